#include "pirep/errors.hpp"

namespace pirep {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric_failure: return "numeric_failure";
    case ErrorKind::invalid_correspondence: return "invalid_correspondence";
    case ErrorKind::invalid_representation: return "invalid_representation";
    case ErrorKind::intertwiner: return "intertwiner";
    case ErrorKind::composition: return "composition";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::resource: return "resource";
    case ErrorKind::window: return "window";
    case ErrorKind::usage: return "usage";
    case ErrorKind::parse: return "parse";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace pirep
