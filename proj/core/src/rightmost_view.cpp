#include "rightmost/rightmost_view.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "rightmost/errors.hpp"

namespace rightmost {

bool AnchoredConfig::contains(int offset) const {
  if (reliable_depth && offset < *reliable_depth) return true;
  return std::binary_search(offsets.begin(), offsets.end(), offset, std::greater<>());
}

std::string CylinderPattern::to_string() const {
  std::string s(static_cast<std::size_t>(r), '0');
  for (int k = 1; k <= r; ++k) {
    if (test(k)) s[static_cast<std::size_t>(k - 1)] = '1';
  }
  return s;
}

CylinderPattern CylinderPattern::parse(const std::string& text) {
  if (text.empty() || text.size() > 63) throw ConfigError("cylinder pattern must have 1..63 bits");
  CylinderPattern p{static_cast<int>(text.size()), 0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      p.bits |= std::uint64_t{1} << i;
    } else if (text[i] != '0') {
      throw ConfigError("cylinder pattern must consist of 0 and 1");
    }
  }
  return p;
}

InitialCondition InitialCondition::finite(std::vector<int> offsets) {
  std::sort(offsets.begin(), offsets.end(), std::greater<>());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  if (offsets.empty() || offsets.front() != 0) throw ConfigError("finite initial set must contain 0");
  for (const int x : offsets) {
    if (x > 0 || (x & 1) != 0) throw ConfigError("finite initial set must consist of nonpositive even sites");
  }
  return {Kind::Finite, std::move(offsets)};
}

InitialCondition InitialCondition::parse(const std::string& text) {
  if (text == "origin") return origin();
  if (text == "full") return full();
  const std::string prefix = "finite:";
  if (text.rfind(prefix, 0) == 0) {
    std::vector<int> offsets;
    std::stringstream in(text.substr(prefix.size()));
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        offsets.push_back(std::stoi(item, &used));
        if (used != item.size()) throw ConfigError("bad offset '" + item + "'");
      } catch (const std::logic_error&) {
        throw ConfigError("bad offset '" + item + "' in initial condition");
      }
    }
    return finite(std::move(offsets));
  }
  throw ConfigError("initial condition must be origin, full or finite:<offsets>, got '" + text + "'");
}

std::string InitialCondition::to_string() const {
  switch (kind) {
    case Kind::Origin:
      return "origin";
    case Kind::Full:
      return "full";
    case Kind::Finite: {
      std::string s = "finite:";
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(offsets[i]);
      }
      return s;
    }
  }
  return "origin";
}

int InitialCondition::depth_sites() const {
  return kind == Kind::Finite ? -offsets.back() / 2 : 0;
}

LevelConfig initial_config(const InitialCondition& init, const Window& window, bool truncate_full) {
  const auto width = static_cast<std::size_t>(window.width);
  const auto zero = window.index(0, 0);
  if (!zero) throw ConfigError("window does not contain site 0");
  switch (init.kind) {
    case InitialCondition::Kind::Origin: {
      const int x[] = {0};
      return LevelConfig::from_positions(0, window.origin(0), width, x);
    }
    case InitialCondition::Kind::Finite: {
      if (-init.offsets.back() / 2 > static_cast<int>(*zero)) {
        throw WindowOverflow("finite initial set is deeper than the window");
      }
      return LevelConfig::from_positions(0, window.origin(0), width, init.offsets);
    }
    case InitialCondition::Kind::Full: {
      LevelConfig c{0, window.origin(0), SiteSet(width),
                    truncate_full ? BoundaryMode::Free : BoundaryMode::FullLeft};
      for (std::size_t i = 0; i <= *zero; ++i) c.occupancy.set(i);
      return c;
    }
  }
  throw ContractViolation("unknown initial condition");
}

AnchoredConfig anchor(const LevelConfig& config) {
  AnchoredConfig out;
  const bool fringe = config.boundary == BoundaryMode::FullLeft;
  const auto top = config.occupancy.highest();
  if (!top) {
    if (!fringe) return out;
    // Nothing tracked is occupied: the rightmost point is the top of the fringe.
    out.offsets.push_back(0);
    out.reliable_depth = 0;
    return out;
  }
  const int max = config.position(*top);
  for (std::size_t i = *top + 1; i-- > 0;) {
    if (config.occupancy.test(i)) out.offsets.push_back(config.position(i) - max);
  }
  if (fringe) out.reliable_depth = config.origin - max;
  return out;
}

CylinderPattern project(const AnchoredConfig& config, int r) {
  if (config.is_empty()) throw ContractViolation("cannot project the EMPTY state");
  if (r < 1 || r > 63) throw ContractViolation("cylinder radius must lie in 1..63");
  if (config.reliable_depth && -2 * r < *config.reliable_depth) {
    throw ContractViolation("cylinder radius " + std::to_string(r) +
                            " exceeds the reliable depth of a truncated configuration");
  }
  CylinderPattern p{r, 0};
  for (const int o : config.offsets) {
    const int k = -o / 2;
    if (k >= 1 && k <= r) p.bits |= std::uint64_t{1} << (k - 1);
  }
  return p;
}

ZetaRun run_zeta_chain(const Environment& env, const InitialCondition& init) {
  ZetaRun run;
  LevelConfig config = initial_config(init, env.window);
  run.states.reserve(static_cast<std::size_t>(env.levels() + 1));
  run.states.push_back(anchor(config));
  for (int k = 0; k < env.levels(); ++k) {
    config = step_forward(config, env.layer(k));
    if (config.lost_right || config.lost_left) {
      throw WindowOverflow("occupied site left the window at level " + std::to_string(k + 1));
    }
    if (run.survival.absorbed_at) {
      run.states.push_back(AnchoredConfig::empty_state());
      continue;
    }
    run.states.push_back(anchor(config));
    if (run.states.back().is_empty()) run.survival.absorbed_at = k + 1;
  }
  return run;
}

std::string to_json(const AnchoredConfig& config) {
  if (config.is_empty()) return "null";
  nlohmann::json offsets = config.offsets;
  if (!config.reliable_depth) return offsets.dump();
  nlohmann::json j;
  j["offsets"] = offsets;
  j["occupied_below"] = *config.reliable_depth;
  return j.dump();
}

}  // namespace rightmost
