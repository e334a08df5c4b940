#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hdmd::cli {

// Runs the command line (without the program name) and returns the exit
// code: 0 on success, 1 on a runtime failure, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// A length flag value: plain seconds ("73.1" or "73.1s"), multiples of the
// reference period ("10T"), or a ratio of the training length ("0.5625R").
struct Length {
    double value = 0.0;
    char unit = 's';

    double seconds(double t_ref, double l_tr = 0.0) const;
};

Length parse_length(const std::string& text, bool allow_ratio = false);

}  // namespace hdmd::cli
