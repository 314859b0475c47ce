#ifndef QRES_DIAGNOSTICS_HPP
#define QRES_DIAGNOSTICS_HPP

#include <functional>
#include <string>

namespace qres {

using WarningHandler = std::function<void(const std::string&)>;

/// Emits a non-fatal diagnostic (validity-regime guards and the like).
/// The default handler writes "warning: <msg>" to stderr.
void warn(const std::string& message);

/// Installs a handler and returns the previous one. Pass nullptr to silence.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace qres

#endif  // QRES_DIAGNOSTICS_HPP
