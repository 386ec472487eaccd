#pragma once

#include <string>

namespace ahnag {

/// Shortest round-trip decimal form; "nan" / "inf" / "-inf" for
/// non-finite values. Locale independent.
std::string format_double(double v);

}  // namespace ahnag
