#pragma once

#include <string>

namespace cbamp {

/// Fixed "%.12g" rendering; the one float format used in every CSV so that
/// repeated runs are byte-identical.
std::string fmt_g(double v);

/// RFC-4180 quoting: fields containing commas, quotes or newlines are quoted
/// with internal quotes doubled; all other fields pass through.
std::string csv_field(const std::string& s);

}  // namespace cbamp
