#pragma once

#include <string>
#include <vector>

#include "gyrolev/core/constants.hpp"

namespace gyrolev {

struct Ion {
  std::string label;
  double g = 0.0;      // Lande factor
  double spin = 0.0;   // total angular momentum in units of hbar
  double count = 0.0;  // per formula unit
};

/// Ionic makeup of the magnet; the reference g-factor is a spin-weighted
/// mean over these species.
class IonComposition {
 public:
  explicit IonComposition(std::vector<Ion> ions);

  const std::vector<Ion>& ions() const noexcept { return ions_; }

  static IonComposition nd2fe14b();
  static IonComposition pr2fe14b();

 private:
  std::vector<Ion> ions_;
};

struct DerivedProperties {
  double volume;   // m^3
  double mass;     // kg
  double moment;   // A m^2
  double inertia;  // kg m^2
};

/// Uniformly magnetized sphere.
class MagnetSpec {
 public:
  MagnetSpec(double radius, double magnetization, double density,
             IonComposition composition = IonComposition::nd2fe14b());

  double radius() const noexcept { return radius_; }
  double magnetization() const noexcept { return magnetization_; }
  double density() const noexcept { return density_; }
  const IonComposition& composition() const noexcept { return composition_; }

  double volume() const noexcept;
  double mass() const noexcept;
  double moment() const noexcept;
  double inertia() const noexcept;

 private:
  double radius_;
  double magnetization_;
  double density_;
  IonComposition composition_;
};

DerivedProperties derived_properties(const MagnetSpec& spec);

/// Spherical superconducting cavity of radius `radius`.
class TrapSpec {
 public:
  explicit TrapSpec(double radius, double g0 = PhysicalConstants::standard_gravity);

  double radius() const noexcept { return radius_; }
  double g0() const noexcept { return g0_; }

 private:
  double radius_;
  double g0_;
};

}  // namespace gyrolev
