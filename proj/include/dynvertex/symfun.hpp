#pragma once
// Small partition functions B_{mu/nu}, D_{mu/nu} and their fused and stochastic variants.
// Coordinates are shifted one column to the left of the model convention: paths enter at
// column 0 and the dynamical parameter at (0, 0) is the base value.

#include <functional>
#include <vector>

#include "dynvertex/weights.hpp"

namespace dv {

class Signature {
public:
    Signature() = default;
    explicit Signature(std::vector<int> parts);  // throws OutOfDomain unless weakly decreasing, >= 0
    const std::vector<int>& parts() const { return parts_; }
    int length() const { return int(parts_.size()); }
    int first() const { return parts_.empty() ? 0 : parts_.front(); }
    int last() const { return parts_.empty() ? 0 : parts_.back(); }
    int size() const;
    int multiplicity(int j) const;
    bool operator==(const Signature& o) const { return parts_ == o.parts_; }

private:
    std::vector<int> parts_;
};

// All signatures of the given length with parts in [0, max_part].
std::vector<Signature> signatures(int length, int max_part);

struct ColumnSpec {
    cplx lambda;
    std::vector<cplx> Z;  // z_0, z_1, ...
    std::vector<cplx> L;  // Lambda_0, Lambda_1, ...
    std::vector<cplx> W;  // spectral parameters (top row first); fused block k starts at W[k]
    std::vector<int> J;   // fusion sizes per row; empty means all ones
    EllipticContext ctx = EllipticContext::trigonometric(0.07);
};

struct RhoSpecialization {
    cplx z0, Lambda0;
    cplx p0(cplx eta) const { return z0 + eta * (1.0 - Lambda0); }
    cplx q0(cplx eta) const { return z0 + eta * (1.0 + Lambda0); }
};

// symfun column x is model site x + 1
inline int model_site_from_column(int x) { return x + 1; }

// bound on the number of DP states per column
inline constexpr std::size_t kSymfunStateLimit = 200000;

enum class PathEntry { left, bottom_only };

// Weight of the vertex at column x in a row of fusion size J with spectral v = w - z_x - eta.
using VertexWeightFn = std::function<cplx(int x, int J, const ArrowConfig& c, const UnfusedWeightParams& p)>;

// The generic column-sweep partition function. rows lists (w, J) top row first.
// entry = left: every row takes J paths in from column -1 (B functions);
// bottom_only: D functions. base is the dynamical parameter at (0, 0).
cplx partition_function(const Signature& mu, const Signature& nu, const std::vector<cplx>& w,
                        const std::vector<int>& J, cplx base, const std::vector<cplx>& Z,
                        const std::vector<cplx>& L, const EllipticContext& ctx, PathEntry entry,
                        const VertexWeightFn& weight);

cplx b_munu(const Signature& mu, const Signature& nu, const ColumnSpec& spec);
cplx d_munu(const Signature& mu, const Signature& nu, const ColumnSpec& spec);
// D times prod_{k<N} f(lambda + 2 eta k), N = number of rows
cplx d_munu_normalized(const Signature& mu, const Signature& nu, const ColumnSpec& spec);

// fused rows: W[k] is the bottom spectral parameter of block k, J[k] its size
cplx b_fused(const Signature& mu, const Signature& nu, const ColumnSpec& spec);
// the unfused spectral list w_k, w_k + 2 eta, ..., w_k + 2 eta (J_k - 1) of a fused spec
std::vector<cplx> expand_blocks(const ColumnSpec& spec);

// normalized D at the rho specialization (trigonometric only)
cplx d_rho(const Signature& mu, cplx lambda, const std::vector<cplx>& L, const EllipticContext& ctx);

// stochastic B through the D-ratio formula; fused blocks are expanded
cplx b_stochastic(const Signature& mu, const Signature& nu, const ColumnSpec& spec, const RhoSpecialization& rho);
cplx b_stochastic(const Signature& mu, const Signature& nu, const ColumnSpec& spec);
// the same quantity as a partition function of sigma weights, weight 1 on column 0
cplx b_stochastic_vertex_form(const Signature& mu, const Signature& nu, const ColumnSpec& spec);

} // namespace dv
