#include "gyrolev/core/magnet.hpp"

#include <cmath>
#include <numbers>

#include "gyrolev/core/errors.hpp"

namespace gyrolev {

IonComposition::IonComposition(std::vector<Ion> ions) : ions_(std::move(ions)) {
  if (ions_.empty()) throw DomainError("ion composition must not be empty");
  for (const auto& ion : ions_) {
    if (!(ion.g > 0.0) || !(ion.spin > 0.0) || !(ion.count > 0.0))
      throw DomainError("ion '" + ion.label + "' needs positive g, spin and count");
  }
}

// Rare-earth 3+ ions carry J = L + S (spin and orbital); Fe counts spin only.
IonComposition IonComposition::nd2fe14b() {
  return IonComposition({{"Nd3+", 8.0 / 11.0, 4.5, 2.0}, {"Fe", 2.0, 0.5, 14.0}});
}

IonComposition IonComposition::pr2fe14b() {
  return IonComposition({{"Pr3+", 4.0 / 5.0, 4.0, 2.0}, {"Fe", 2.0, 0.5, 14.0}});
}

MagnetSpec::MagnetSpec(double radius, double magnetization, double density,
                       IonComposition composition)
    : radius_(radius),
      magnetization_(magnetization),
      density_(density),
      composition_(std::move(composition)) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("magnet radius must be > 0");
  if (!(magnetization > 0.0) || !std::isfinite(magnetization))
    throw DomainError("magnetization must be > 0");
  if (!(density > 0.0) || !std::isfinite(density)) throw DomainError("density must be > 0");
}

double MagnetSpec::volume() const noexcept {
  return 4.0 / 3.0 * std::numbers::pi * radius_ * radius_ * radius_;
}
double MagnetSpec::mass() const noexcept { return density_ * volume(); }
double MagnetSpec::moment() const noexcept { return magnetization_ * volume(); }
double MagnetSpec::inertia() const noexcept { return 0.4 * mass() * radius_ * radius_; }

DerivedProperties derived_properties(const MagnetSpec& spec) {
  return {spec.volume(), spec.mass(), spec.moment(), spec.inertia()};
}

TrapSpec::TrapSpec(double radius, double g0) : radius_(radius), g0_(g0) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("trap radius must be > 0");
  if (!(g0 > 0.0) || !std::isfinite(g0)) throw DomainError("gravity must be > 0");
}

}  // namespace gyrolev
