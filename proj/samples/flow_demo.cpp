// Follows the coupling u = U/t through five RG levels on either side of the
// fixed point and prints the block-block entanglement at each level.

#include <cstdio>

#include "trirg/trirg.hpp"

int main() {
  using namespace trirg;
  const auto g = lattice::build_block_geometry();
  const double u_star = rg::find_fixed_point(5.0, 25.0, g);
  std::printf("u* = %.6f\n\n", u_star);
  std::printf("%8s %5s %10s %12s %8s %8s\n", "u0", "level", "N", "u", "E_bb", "E_b7");
  for (double u0 : {0.5 * u_star, u_star, 2.0 * u_star}) {
    const auto traj = rg::rg_flow(u0, 6, g);
    for (const auto& l : traj.levels) {
      const auto bb = entanglement::block_block_entanglement(traj, l.level);
      std::printf("%8.4f %5zu %10.0f %12.6g %8.4f %8.4f\n", u0, l.level, rg::RGTrajectory::system_size(l.level), l.u,
                  bb.center, bb.rim);
    }
    std::printf("\n");
  }
}
