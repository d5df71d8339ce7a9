// Prints the photon-number distributions of the two heralded squeezed cats.

#include <cstdio>
#include <numbers>

#include "qoptics/analysis.hpp"
#include "qoptics/protocols.hpp"

int main() {
  using namespace qoptics;
  const SuperpositionParams p{{SqueezeParam{0.8, 0.0}, std::nullopt, 1e-12}, std::numbers::pi / 2, 0.0};
  const auto res = run_superposition(p);
  for (const auto& b : res.branches) {
    std::printf("%s  P = %.6f\n", b.label.c_str(), b.probability);
    if (!b.state) continue;
    const auto dist = photon_distribution(*b.state, "a");
    for (std::size_t n = 0; n < dist.size() && n <= 16; ++n) {
      if (dist[n] > 1e-6) std::printf("  n=%2zu  %.6f\n", n, dist[n]);
    }
  }
}
