#include "rnoma/units.hpp"

#include <cmath>

namespace rnoma {

double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }
double watts_to_dbw(double watts) { return 10.0 * std::log10(watts); }
double dbi_to_linear(double dbi) { return std::pow(10.0, dbi / 10.0); }
double linear_to_dbi(double gain) { return 10.0 * std::log10(gain); }
double attenuation_db_to_amplitude(double db) { return std::pow(10.0, -db / 20.0); }

}  // namespace rnoma
