#pragma once

// Deterministic CSV / JSON serialization.  Numbers are written with 17
// significant digits so doubles round-trip exactly; header lines are
// '#'-prefixed and carry the resolved configuration.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "dynamics.hpp"
#include "resonances.hpp"

namespace qtun {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_header_lines(std::ostream& os, const std::vector<std::string>& lines) {
    for (const std::string& l : lines) os << "# " << l << "\n";
}

inline void write_time_series_csv(std::ostream& os, const TimeSeries& ts,
                                  const std::vector<std::string>& header) {
    write_header_lines(os, header);
    os << "t_fs,dens_total,dens_q,dens_r,interference,dens_free,converged\n";
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
        const WaveParts& w = ts.rows[i];
        os << fmt17(ts.t[i]) << ',' << fmt17(w.dens_total) << ',' << fmt17(w.dens_q) << ','
           << fmt17(w.dens_r) << ',' << fmt17(w.interference) << ',' << fmt17(ts.free_density[i])
           << ',' << (w.converged ? 1 : 0) << "\n";
    }
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows,
                           const std::string& axis_name, const std::string& observable_name,
                           const std::vector<std::string>& header) {
    write_header_lines(os, header);
    os << axis_name << ',' << observable_name << ",label,status\n";
    for (const ScanRow& r : rows) {
        std::string status = r.status;
        for (char& c : status)
            if (c == ',' || c == '\n') c = ';';
        os << fmt17(r.axis_value) << ',' << fmt17(r.value) << ',' << r.label << ',' << status
           << "\n";
    }
}

}  // namespace qtun
