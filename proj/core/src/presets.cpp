#include "jkl/presets.hpp"

#include <stdexcept>

#include "jkl/parser.hpp"

namespace jkl {

ReactionNetwork Preset::network() const { return parse_model(text); }

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"bimol", "birth of A and B, annihilation A + B -> 0",
       "species A B\n"
       "k1 = 1\n"
       "k2 = 1\n"
       "R1: 0 -> A @ k1\n"
       "R2: 0 -> B @ k1\n"
       "R3: A + B -> 0 @ k2\n",
       {0, 0}, 10.0},
      {"reversible", "closed A + B <-> C; a + b + 2c is conserved",
       "species A B C\n"
       "k1 = 1\n"
       "k2 = 1\n"
       "R1: A + B -> C @ k1\n"
       "R2: C -> A + B @ k2\n",
       {5, 5, 0}, 1.0},
      {"reversible-open", "A + B <-> C with C exchanged against a reservoir",
       "species A B C\n"
       "k1 = 1\n"
       "k2 = 1\n"
       "k3 = 1\n"
       "k4 = 1\n"
       "R1: A + B -> C @ k1\n"
       "R2: C -> A + B @ k2\n"
       "R3: C -> 0 @ k3\n"
       "R4: 0 -> C @ k4\n",
       {5, 5, 0}, 1.0},
      {"extended-bimol", "bimol with first-order decay of A and B",
       "species A B\n"
       "k1 = 1\n"
       "k2 = 1\n"
       "k3 = 1\n"
       "R1: 0 -> A @ k1\n"
       "R2: 0 -> B @ k1\n"
       "R3: A + B -> 0 @ k2\n"
       "R4: A -> 0 @ k3\n"
       "R5: B -> 0 @ k3\n",
       {0, 0}, 1.0},
      {"cubic", "zero-drift cubic pair whose third factorial moment explodes (simulation only)",
       "species X\n"
       "R1: 3 X -> X @ 0.5\n"
       "R2: 3 X -> 4 X @ 1.0\n",
       {3}, 0.05},
      {"enzyme", "complex C degraded by enzyme E, both with linear inflow and decay",
       "species C E\n"
       "alphaC = 10010\n"
       "betaC = 1\n"
       "k = 100\n"
       "alphaE = 10\n"
       "betaE = 1\n"
       "inC: 0 -> C @ alphaC\n"
       "outC: C -> 0 @ betaC\n"
       "deg: C + E -> E @ k\n"
       "inE: 0 -> E @ alphaE\n"
       "outE: E -> 0 @ betaE\n",
       {10, 10}, 8.0},
      {"enzyme-linear", "enzyme model with E frozen at its mean, kE = k <E>",
       "species C\n"
       "alphaC = 10010\n"
       "betaC = 1\n"
       "kE = 1000\n"
       "inC: 0 -> C @ alphaC\n"
       "outC: C -> 0 @ betaC\n"
       "deg: C -> 0 @ kE\n",
       {10}, 8.0},
  };
  return all;
}

const Preset& preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.push_back(p.name);
  return out;
}

}  // namespace jkl
