#include "sarsoil/soil_physics.hpp"

#include <cmath>

#include "sarsoil/errors.hpp"

namespace sarsoil {

double volumetric_from_gravimetric(double gravimetric, double bulk_density,
                                   double water_density) {
  if (!(gravimetric >= 0.0)) {
    throw DomainError("gravimetric moisture must be >= 0");
  }
  if (!(bulk_density > 0.0) || !(water_density > 0.0)) {
    throw DomainError("soil and water densities must be > 0");
  }
  return gravimetric * bulk_density / water_density;
}

double dielectric_from_moisture(double mv) {
  if (!(mv >= 0.0 && mv <= kMaxVolumetricMoisture)) {
    throw DomainError("volumetric moisture outside [0, 0.5]");
  }
  return 3.03 + 9.3 * mv + 146.0 * mv * mv - 76.7 * mv * mv * mv;
}

double moisture_from_dielectric(double eps) {
  const double eps_lo = dielectric_from_moisture(0.0);
  const double eps_hi = dielectric_from_moisture(kMaxVolumetricMoisture);
  if (!(eps >= eps_lo && eps <= eps_hi)) {
    throw DomainError("dielectric constant outside invertible range");
  }
  // The polynomial is strictly increasing on [0, 0.5], so bisection converges.
  double lo = 0.0;
  double hi = kMaxVolumetricMoisture;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (dielectric_from_moisture(mid) < eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MoistureSample MoistureSample::from_gravimetric(double gravimetric, double bulk_density,
                                                double water_density) {
  MoistureSample s;
  s.gravimetric = gravimetric;
  s.bulk_density = bulk_density;
  s.water_density = water_density;
  s.volumetric = volumetric_from_gravimetric(gravimetric, bulk_density, water_density);
  return s;
}

}  // namespace sarsoil
