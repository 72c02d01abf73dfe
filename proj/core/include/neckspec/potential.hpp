#pragma once

#include <functional>
#include <variant>
#include <vector>

namespace neckspec {

// Potentials are clamped to [-kPotentialClamp, kPotentialClamp] when
// discretized; the solver reports when the clamp fired.
inline constexpr double kPotentialClamp = 1e12;

struct ConstantPotential {
  double value = 0.0;
};

// coef / (offset + slope * tau)^2
struct InverseSquarePotential {
  double coef = 0.0;
  double slope = 0.0;
  double offset = 1.0;
};

// m+1 uniform samples over [0, L]; values[i] = V(i * L / m).
struct TablePotential {
  std::vector<double> values;
};

struct CallablePotential {
  std::function<double(double)> fn;
};

using Potential = std::variant<ConstantPotential, InverseSquarePotential,
                               TablePotential, CallablePotential>;

}  // namespace neckspec
