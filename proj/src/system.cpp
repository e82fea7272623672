#include "ude/system.hpp"

namespace ude {

const char* system_name(SystemKind k) {
  switch (k) {
    case SystemKind::rc: return "rc";
    case SystemKind::sir: return "sir";
    case SystemKind::rc_linear: return "rc-linear";
    case SystemKind::sir_npi: return "sir-npi";
  }
  return "?";
}

std::size_t OdeSystem::state_dim() const {
  return kind == SystemKind::rc || kind == SystemKind::rc_linear ? 1 : 3;
}

std::size_t OdeSystem::exogenous_dim() const {
  switch (kind) {
    case SystemKind::rc_linear: return 1;
    case SystemKind::sir_npi: return 2;
    default: return 0;
  }
}

std::size_t OdeSystem::ode_param_dim() const {
  return kind == SystemKind::rc ? 2 : 1;
}

std::vector<std::string> OdeSystem::param_names() const {
  switch (kind) {
    case SystemKind::rc: return {"tau", "v_s"};
    case SystemKind::rc_linear: return {"tau"};
    case SystemKind::sir:
    case SystemKind::sir_npi: return {"beta"};
  }
  return {};
}

}  // namespace ude
