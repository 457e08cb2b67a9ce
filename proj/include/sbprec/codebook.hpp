// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/numerics.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbp {

enum class Family { Legacy, TypeI8Tx, Proposed };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

/// One single-layer codebook entry. Amplitude scaling is folded into the
/// weights, so |weights| = 1 and every entry has modulus 1/sqrt(n_tx).
struct Precoder {
    CVec weights;
    std::size_t index = 0;
};

/// Immutable, indexed list of precoders for one antenna-port count.
class Codebook {
public:
    Codebook(int n_tx, Family family, std::vector<CVec> weights);

    int n_tx() const { return n_tx_; }
    Family family() const { return family_; }
    std::size_t size() const { return entries_.size(); }
    std::span<const Precoder> entries() const { return entries_; }
    const Precoder& operator[](std::size_t tpmi) const { return entries_[tpmi]; }

    /// Per-port phase budgets M_2..M_{n_tx} (Proposed family, and legacy 2TX
    /// which is the same grid).
    const std::vector<int>& m_bits() const { return m_bits_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }

    /// For product-grid codebooks: port_phasors()[i][m] is the weight of port i
    /// for phase index m, and entry TPMI = sum_i m_i * prod_{k>i} |grid_k|
    /// (port 1 slowest, last port fastest). Empty otherwise.
    const std::vector<CVec>& port_phasors() const { return port_phasors_; }
    bool is_product_grid() const { return !port_phasors_.empty(); }

    /// Entry-major contiguous copy of all weights (size() * n_tx values).
    std::span<const cplx> flat_weights() const { return flat_; }

private:
    friend Codebook proposed_codebook(int n_tx, std::span<const int> m_bits);
    friend Codebook type1_8tx_codebook(int n1, int n2);
    friend Codebook legacy_codebook(int n_tx);

    int n_tx_;
    Family family_;
    std::vector<Precoder> entries_;
    std::vector<cplx> flat_;
    std::vector<int> m_bits_;
    int n1_ = 0;
    int n2_ = 0;
    std::vector<CVec> port_phasors_;
};

/// Relative-phase codebook: (1/sqrt(n_tx)) (1, e^{j2pi m_2/2^M_2}, ..., e^{j2pi m_N/2^M_N}).
/// m_bits holds M_2..M_{n_tx}; M_i = 0 pins port i to phase 0.
Codebook proposed_codebook(int n_tx, std::span<const int> m_bits);

/// Dual-polarized DFT codebook with O1 = O2 = 1: 4*n1*n2 entries
/// (1/(2 sqrt 2)) (v, phi_n v) with v = v_h(i_h) kron v_v(i_v), phi_n = e^{j pi n/2},
/// enumerated with i_h slowest, then i_v, then n. Requires n1*n2 == 4.
Codebook type1_8tx_codebook(int n1, int n2);

/// Fully coherent single-layer codebooks in use today: 4 entries for 2 ports,
/// 16 for 4 ports, and the 8-port Type I set with (n1, n2) = (4, 1).
Codebook legacy_codebook(int n_tx);

/// Every entry of `small` lies within tol (max entrywise distance) of some
/// entry of `big`. Throws StructuralError when n_tx differs.
bool is_superset(const Codebook& big, const Codebook& small, double tol = 1e-9);

struct CodebookCheck {
    bool ok = true;
    std::string message;
};

/// Checks the precoder invariants (unit norm, constant modulus, real positive
/// first entry) and that no two entries coincide within dup_tol.
CodebookCheck validate(const Codebook& cb, double tol = 1e-12, double dup_tol = 1e-9);

/// Text export: header "n_tx family count", then one precoder per line as
/// space-separated "re+imj" values printed in shortest round-trip form.
void write_codebook(std::ostream& os, const Codebook& cb);
Codebook read_codebook(std::istream& is);

std::string format_complex(cplx z);
cplx parse_complex(std::string_view token);

} // namespace sbp
