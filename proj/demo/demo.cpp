// Generates a persistent binary chain and compares the correlation-based
// entropy estimate with plug-in block entropies.

#include <cstdio>
#include <vector>

#include "symentropy/symentropy.hpp"

int main() {
  using namespace symentropy;

  const ProbabilityVector p({0.5, 0.5});
  std::vector<double> k(8, 0.0);
  for (std::size_t r = 0; r < 4; ++r) k[r] = 0.08;
  const auto target = binary_normalized_series(p, k);
  const AdditiveCpf cpf{p, memory_function_exact(denormalize(target), k.size())};

  const auto chain = generate(cpf, 1'000'000, 42);
  std::printf("generated M = %zu, clamp events = %zu\n", chain.sequence.size(), chain.clamp_events);

  const auto corr = correlation_series_auto(chain.sequence, 40);
  const auto curve = correlation_entropy_curve(corr, 40);
  const auto block = block_entropy_curve(chain.sequence, 12);
  const auto norm = normalize(corr);

  std::printf("%3s %10s %12s %12s %10s\n", "L", "K(L)", "h_corr", "h_corrected", "h_block");
  for (std::size_t L = 1; L <= 12; ++L)
    std::printf("%3zu %10.5f %12.6f %12.6f %10.6f\n", L, norm.value_or_zero(L, 1, 1), curve.points[L - 1].h,
                *curve.points[L - 1].h_corrected, block.points[L - 1].differential);

  const double expected = 1.0 - 4 * 0.08 * 0.08 * kHalfInvLn2;
  std::printf("target plateau %.6f, R_c = ", expected);
  if (const auto rc = correlation_length(curve)) std::printf("%zu\n", *rc);
  else std::printf("none\n");
}
