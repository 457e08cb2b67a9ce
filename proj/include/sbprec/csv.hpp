// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sbp {

/// "scheme,snr_db,trials,errors,bler", rows sorted by (scheme, snr_db), reals
/// printed with 6 significant digits.
void write_csv(std::ostream& os, const SweepResult& result);

/// Writes the CSV to `path`; throws std::runtime_error naming the path on
/// failure.
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

/// Parses a CSV produced by write_csv. Series come back in file order with
/// bler recomputed as errors / trials.
SweepResult read_csv(std::istream& is);

/// JSON sidecar with the run metadata that must stay out of the
/// byte-reproducible CSV (wall time, version, config echo, SNR definition).
void emit_metadata(const SweepResult& result, const std::filesystem::path& path);

} // namespace sbp
