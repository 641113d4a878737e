#pragma once

namespace sarsoil {

/// Upper end of the volumetric moisture range the dielectric mapping covers.
inline constexpr double kMaxVolumetricMoisture = 0.5;

/// Volumetric moisture (cm^3/cm^3) from gravimetric moisture (g/g),
/// bulk soil density and water density (both g/cm^3).
double volumetric_from_gravimetric(double gravimetric, double bulk_density,
                                   double water_density = 1.0);

/// Soil dielectric constant from volumetric moisture via the Topp (1980)
/// polynomial: eps = 3.03 + 9.3 mv + 146 mv^2 - 76.7 mv^3.
///
/// The mapping is a stand-in mixing model; swap this pair of functions to use
/// a texture-aware model. Valid for mv in [0, 0.5], strictly increasing.
double dielectric_from_moisture(double mv);

/// Inverse of dielectric_from_moisture by bisection; absolute tolerance 1e-12.
double moisture_from_dielectric(double eps);

struct MoistureSample {
  double gravimetric = 0.0;    // g water per g dry soil
  double bulk_density = 0.0;   // g/cm^3
  double water_density = 1.0;  // g/cm^3
  double volumetric = 0.0;     // cm^3/cm^3

  static MoistureSample from_gravimetric(double gravimetric, double bulk_density,
                                         double water_density = 1.0);
};

}  // namespace sarsoil
