#include "entanglekit/io.hpp"

#include <cstdio>
#include <ostream>

namespace entanglekit {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_landscape_csv(std::ostream& out, const LandscapeTable& t) {
    out << "alpha,log10_alpha,beta,delta0,tau_ratio\n";
    for (const LandscapeRow& r : t.rows)
        out << fmt17(r.alpha) << ',' << fmt17(r.log10_alpha) << ','
            << fmt17(r.beta) << ',' << fmt17(r.delta0) << ','
            << fmt17(r.tau_ratio) << '\n';
}

void write_series_csv(std::ostream& out, const TimeSeries& s) {
    out << "t,delta_analytic,delta_oracle,cm_width_ratio\n";
    for (const TimeRow& r : s.rows) {
        out << fmt17(r.t) << ',' << fmt17(r.delta_analytic) << ',';
        if (r.delta_oracle) out << fmt17(*r.delta_oracle);
        out << ',' << fmt17(r.cm_width_ratio) << '\n';
    }
}

} // namespace entanglekit
