#pragma once

#include <cstddef>
#include <vector>

#include "mfl/core.hpp"
#include "mfl/fft.hpp"

// Hot loops of the N-body propagator and the marginal contraction.
// Tensor layout: amplitude index = j_1 M^{N-1} + ... + j_N, so particle 1 is the slowest axis.
// `serial` is the reference; `parallel` splits independent lines/rows across OpenMP threads and
// produces bit-identical results (no reductions change order).
namespace mfl::kernels {

std::size_t tensor_size(int M, int N);

namespace serial {
// amps *= exp(i * factor * sum_{k<l} vdiff[(j_k - j_l) mod M])
void pair_phase(std::vector<cplx>& amps, int M, int N, const std::vector<double>& vdiff, double factor);
// along every axis: line -> IDFT(mult .* DFT(line)); mult must already carry the 1/M
void axis_multiplier(std::vector<cplx>& amps, int M, int N, const std::vector<cplx>& mult, const Fft1d& fft);
// F(x, x') = scale * sum_rest a(x, rest) conj(a(x', rest)), first `lead` axes kept
CMatrix contract(const std::vector<cplx>& amps, int M, int N, int lead, double scale);
}  // namespace serial

namespace parallel {
void pair_phase(std::vector<cplx>& amps, int M, int N, const std::vector<double>& vdiff, double factor);
void axis_multiplier(std::vector<cplx>& amps, int M, int N, const std::vector<cplx>& mult, const Fft1d& fft);
CMatrix contract(const std::vector<cplx>& amps, int M, int N, int lead, double scale);
}  // namespace parallel

}  // namespace mfl::kernels
