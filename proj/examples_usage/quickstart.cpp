// Build one gap instance, evaluate the canonical fractional solution and a
// few integral labelings.
#include <cstdlib>
#include <iostream>

#include "zext/zext.hpp"

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 8;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

  const auto build = zext::default_gap_instance(n, 4, seed);
  const auto& inst = build.instance;
  std::cout << "vertices " << inst.vertex_count() << ", edges " << inst.graph.edge_count() << ", terminals "
            << inst.terminal_count() << ", girth(G) " << build.provenance.girth << '\n';

  const zext::CanonicalMetricView delta(inst);
  const double frac = zext::fractional_cost(delta, inst);
  std::cout << "fractional " << frac << '\n';

  const auto base = zext::baseline_labelings(inst);
  const auto ckr = zext::ckr_round(inst, delta, seed);
  const auto polished = zext::local_search(inst, base.all_to_one.labeling, 3);
  std::cout << "all_to_one " << base.all_to_one.cost << '\n'
            << "nearest    " << base.nearest_terminal.cost << '\n'
            << "ckr        " << zext::integral_cost(ckr, inst) << '\n'
            << "local      " << zext::integral_cost(polished, inst) << '\n';
}
