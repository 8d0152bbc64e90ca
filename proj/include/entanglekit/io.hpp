#pragma once

#include <iosfwd>
#include <string>

#include "entanglekit/landscape.hpp"

namespace entanglekit {

// Full round-trip precision, locale-free ("%.17g").
std::string fmt17(double v);

// Header alpha,log10_alpha,beta,delta0,tau_ratio then one row per table row,
// LF line endings.
void write_landscape_csv(std::ostream& out, const LandscapeTable& t);

// Header t,delta_analytic,delta_oracle,cm_width_ratio; the oracle cell is
// empty when the column is disabled.
void write_series_csv(std::ostream& out, const TimeSeries& s);

} // namespace entanglekit
