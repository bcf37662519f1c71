#include <cstdio>
#include <numbers>

#include "hkl2/cohomogeneity_one.hpp"
#include "hkl2/exterior_algebra.hpp"
#include "hkl2/gibbons_hawking.hpp"
#include "hkl2/hk_quotient.hpp"
#include "hkl2/nahm.hpp"

// A short tour: one headline number from each module.

using namespace hkl2;

int main() {
  const auto q = ext::QuaternionicStructure::standard(1);
  const auto ker = ext::middle_kernel(q);
  std::printf("so5 residual (k=1):           %.3e\n", ext::verify_so5(q).max_so5);
  std::printf("middle kernel dimension (k=1): %zu\n", ker.size());

  constexpr double pi = std::numbers::pi;
  const gh::L2Result l2 = gh::l2_norm(gh::GHData::make(1.0, 4.0 * pi));
  std::printf("Taub-NUT |d theta|^2 / 16 pi^2: %.15f\n", l2.value / (16.0 * pi * pi));

  for (const auto& p : {bianchi::atiyah_hitchin_model_profile(), bianchi::eguchi_hanson_profile(0.5),
                        bianchi::biaxial_taubnut_profile(1.0)}) {
    std::printf("%-22s L2 axes:", p.name.c_str());
    for (int a : bianchi::classify_l2(p).integrable_axes()) std::printf(" %d", a);
    std::printf("\n");
  }

  const auto calabi = hk::GroupActionSpec::calabi(2);
  std::printf("Calabi n=2 vs Eguchi-Hanson metric at s=1: rel err %.2e\n", hk::compare_eguchi_hanson(1.0).rel_err);
  std::printf("Calabi n=2 rotation relations residual:     %.2e\n",
              hk::omegas_residual(calabi, Eigen::Vector4d(0.3, -0.2, 0.7, 0.4)).max());

  for (double eps : {1e-2, 1e-3}) {
    const nahm::ContractionResult r = nahm::run(nahm::two_pole_scenario(0.5, eps, 2001));
    std::printf("Nahm eps=%.0e: lhs %.10f rhs %.10f boundary %.2e rel err %.1e\n", eps, r.lhs, r.rhs, r.boundary,
                r.rel_err);
  }
  return 0;
}
