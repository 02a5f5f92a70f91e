#include "puw/scenario.hpp"

#include <cstdio>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace puw::sim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument("negative");
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a non-negative integer, got '" + v + "'");
  }
}

double parse_dbl(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + v + "'");
  }
}

std::string fmt_dbl(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Scenario scenario_parse(const std::string& text) {
  Scenario s;
  std::unordered_map<std::string, int> key_line;
  const auto line_of = [&](const std::string& k) {
    const auto it = key_line.find(k);
    return it == key_line.end() ? 0 : it->second;
  };

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool saw_duration = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(line, "expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string val = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "missing key before '='");
    if (val.empty()) throw ParseError(line, "missing value for '" + key + "'");
    key_line[key] = line;

    if (key == "task_class") {
      const auto cls = class_from_name(val);
      if (!cls) throw ParseError(line, "unknown task_class '" + val + "'");
      s.task_class = *cls;
    } else if (key == "mode") {
      if (val == "analytic") s.mode = SimMode::Analytic;
      else if (val == "measured") s.mode = SimMode::Measured;
      else throw ParseError(line, "mode must be 'analytic' or 'measured'");
    } else if (key == "seed") {
      s.seed = parse_u64(val, line);
    } else if (key == "initial_difficulty") {
      try {
        s.initial_difficulty.value = rational_parse(val);
      } catch (const std::exception& e) {
        throw ParseError(line, std::string("bad difficulty: ") + e.what());
      }
    } else if (key == "retarget_window") {
      s.retarget_window = static_cast<std::uint32_t>(parse_u64(val, line));
    } else if (key == "target_interblock_s") {
      s.target_interblock_s = parse_u64(val, line);
    } else if (key == "duration_blocks") {
      s.duration_blocks = parse_u64(val, line);
      saw_duration = true;
    } else if (key == "duration_s") {
      s.duration_s = parse_dbl(val, line);
      saw_duration = true;
    } else if (key == "nonce_bits") {
      s.nonce_bits = static_cast<int>(parse_u64(val, line));
    } else if (key == "tsp_alpha") {
      s.tsp_alpha = parse_dbl(val, line);
    } else if (key == "tsp_restart_budget") {
      s.tsp_restart_budget = static_cast<std::uint32_t>(parse_u64(val, line));
    } else if (key == "miner") {
      const auto f = split_ws(val);
      if (f.size() != 4)
        throw ParseError(line, "miner needs '<id> <power> <strategy> <honesty>'");
      MinerSpec m;
      m.id = parse_u64(f[0], line);
      m.power = parse_dbl(f[1], line);
      if (!(m.power > 0)) throw ParseError(line, "miner power must be > 0");
      if (f[2] == "honest_switch") m.strategy = Strategy::HonestSwitch;
      else if (f[2] == "stubborn") m.strategy = Strategy::Stubborn;
      else throw ParseError(line, "strategy must be 'honest_switch' or 'stubborn'");
      if (f[3] == "honest") m.honesty = Honesty::Honest;
      else if (f[3] == "adversarial") m.honesty = Honesty::Adversarial;
      else throw ParseError(line, "honesty must be 'honest' or 'adversarial'");
      for (const auto& prev : s.miners)
        if (prev.id == m.id)
          throw ParseError(line, "duplicate miner id " + std::to_string(m.id));
      s.miners.push_back(m);
    } else if (key == "network") {
      const auto f = split_ws(val);
      if (f.size() == 2 && f[0] == "constant") {
        s.network.kind = NetworkSpec::Kind::Constant;
        s.network.delay_lo_s = s.network.delay_hi_s = parse_dbl(f[1], line);
      } else if (f.size() == 3 && f[0] == "uniform") {
        s.network.kind = NetworkSpec::Kind::Uniform;
        s.network.delay_lo_s = parse_dbl(f[1], line);
        s.network.delay_hi_s = parse_dbl(f[2], line);
      } else {
        throw ParseError(line, "network must be 'constant <s>' or 'uniform <lo> <hi>'");
      }
      if (s.network.delay_lo_s < 0 || s.network.delay_hi_s < s.network.delay_lo_s)
        throw ParseError(line, "network delays must satisfy 0 <= lo <= hi");
    } else if (key == "selection_policy") {
      const auto f = split_ws(val);
      if (f.size() == 1 && f[0] == "fifo") s.selection_policy = SelectionPolicy::fifo();
      else if (f.size() == 1 && f[0] == "uniform_random")
        s.selection_policy = SelectionPolicy::uniform_random();
      else if (f.size() == 2 && f[0] == "miner_choice")
        s.selection_policy = SelectionPolicy::miner_choice(parse_u64(f[1], line));
      else
        throw ParseError(line,
                         "selection_policy must be 'fifo', 'uniform_random', or "
                         "'miner_choice <index>'");
    } else if (key == "supply_initial") {
      s.supply.initial_count = static_cast<std::uint32_t>(parse_u64(val, line));
    } else if (key == "supply_rate_per_s") {
      s.supply.arrival_rate_per_s = parse_dbl(val, line);
      if (s.supply.arrival_rate_per_s < 0)
        throw ParseError(line, "supply_rate_per_s must be >= 0");
    } else if (key == "supply_supplier_id") {
      s.supply.supplier_id = parse_u64(val, line);
    } else if (key == "kov_k") {
      s.supply.kov_k = static_cast<std::uint32_t>(parse_u64(val, line));
    } else if (key == "kov_n") {
      s.supply.kov_n = static_cast<std::uint32_t>(parse_u64(val, line));
    } else if (key == "kov_d") {
      s.supply.kov_d = static_cast<std::uint32_t>(parse_u64(val, line));
    } else if (key == "tsp_cities") {
      s.supply.tsp_cities = static_cast<std::uint32_t>(parse_u64(val, line));
    } else if (key == "tsp_distance") {
      if (val == "euc2d_exact") s.supply.tsp_mode = tsp::DistanceMode::Euc2dExact;
      else if (val == "euc2d_rounded") s.supply.tsp_mode = tsp::DistanceMode::Euc2dRounded;
      else throw ParseError(line, "tsp_distance must be 'euc2d_exact' or 'euc2d_rounded'");
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }

  // Cross-field validation; errors point at the line that set the field
  // (0 when the field never appeared).
  if (s.miners.empty()) throw ParseError(0, "scenario declares no miners");
  if (s.retarget_window < 1)
    throw ParseError(line_of("retarget_window"), "retarget_window must be >= 1");
  if (s.target_interblock_s == 0)
    throw ParseError(line_of("target_interblock_s"), "target_interblock_s must be > 0");
  if (!saw_duration || (s.duration_blocks == 0 && !(s.duration_s > 0)))
    throw ParseError(0, "scenario needs duration_blocks > 0 or duration_s > 0");
  if (s.nonce_bits < 8 || s.nonce_bits > 32)
    throw ParseError(line_of("nonce_bits"), "nonce_bits must be in [8, 32]");
  if (s.initial_difficulty.value.num < s.initial_difficulty.value.den)
    throw ParseError(line_of("initial_difficulty"), "initial_difficulty must be >= 1");
  if (!(s.tsp_alpha >= 1))
    throw ParseError(line_of("tsp_alpha"), "tsp_alpha must be >= 1");
  if (s.tsp_restart_budget < 1)
    throw ParseError(line_of("tsp_restart_budget"), "tsp_restart_budget must be >= 1");
  if (s.mode == SimMode::Analytic && s.task_class != ClassId::Cryptopuzzle)
    throw ParseError(line_of("mode"),
                     "analytic mode models hash racing; use mode = measured for "
                     "kov and tsp scenarios");
  if (s.task_class == ClassId::Kov && (s.supply.kov_k < 2 || s.supply.kov_n < 1 || s.supply.kov_d < 1))
    throw ParseError(line_of("kov_k"), "k-OV supply shape needs kov_k >= 2, kov_n >= 1, kov_d >= 1");
  if (s.task_class == ClassId::Tsp && s.supply.tsp_cities < 4)
    throw ParseError(line_of("tsp_cities"), "tsp_cities must be >= 4");
  return s;
}

std::string scenario_serialize(const Scenario& s) {
  std::ostringstream out;
  out << "task_class = " << class_name(s.task_class) << "\n";
  out << "mode = " << (s.mode == SimMode::Analytic ? "analytic" : "measured") << "\n";
  out << "seed = " << s.seed << "\n";
  out << "initial_difficulty = " << s.initial_difficulty.value.str() << "\n";
  out << "retarget_window = " << s.retarget_window << "\n";
  out << "target_interblock_s = " << s.target_interblock_s << "\n";
  if (s.duration_blocks > 0) out << "duration_blocks = " << s.duration_blocks << "\n";
  if (s.duration_s > 0) out << "duration_s = " << fmt_dbl(s.duration_s) << "\n";
  out << "nonce_bits = " << s.nonce_bits << "\n";
  for (const auto& m : s.miners) {
    out << "miner = " << m.id << " " << fmt_dbl(m.power) << " "
        << (m.strategy == Strategy::HonestSwitch ? "honest_switch" : "stubborn") << " "
        << (m.honesty == Honesty::Honest ? "honest" : "adversarial") << "\n";
  }
  if (s.network.kind == NetworkSpec::Kind::Constant) {
    out << "network = constant " << fmt_dbl(s.network.delay_lo_s) << "\n";
  } else {
    out << "network = uniform " << fmt_dbl(s.network.delay_lo_s) << " "
        << fmt_dbl(s.network.delay_hi_s) << "\n";
  }
  switch (s.selection_policy.kind) {
    case SelectionPolicy::Kind::Fifo:
      out << "selection_policy = fifo\n";
      break;
    case SelectionPolicy::Kind::UniformRandom:
      out << "selection_policy = uniform_random\n";
      break;
    case SelectionPolicy::Kind::MinerChoice:
      out << "selection_policy = miner_choice " << s.selection_policy.miner_choice_index
          << "\n";
      break;
  }
  out << "supply_initial = " << s.supply.initial_count << "\n";
  out << "supply_rate_per_s = " << fmt_dbl(s.supply.arrival_rate_per_s) << "\n";
  out << "supply_supplier_id = " << s.supply.supplier_id << "\n";
  out << "kov_k = " << s.supply.kov_k << "\n";
  out << "kov_n = " << s.supply.kov_n << "\n";
  out << "kov_d = " << s.supply.kov_d << "\n";
  out << "tsp_cities = " << s.supply.tsp_cities << "\n";
  out << "tsp_distance = "
      << (s.supply.tsp_mode == tsp::DistanceMode::Euc2dExact ? "euc2d_exact" : "euc2d_rounded")
      << "\n";
  out << "tsp_alpha = " << fmt_dbl(s.tsp_alpha) << "\n";
  out << "tsp_restart_budget = " << s.tsp_restart_budget << "\n";
  return out.str();
}

}  // namespace puw::sim
