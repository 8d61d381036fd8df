#include "mk2/errors.hpp"

namespace mk2 {

std::string SourceSpan::to_string() const {
    std::string s = std::to_string(line) + ":" + std::to_string(column);
    if (end_line > line || (end_line == line && end_column > column))
        s += "-" + std::to_string(end_line) + ":" + std::to_string(end_column);
    return s;
}

} // namespace mk2
