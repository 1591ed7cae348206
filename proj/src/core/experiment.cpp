#include "bandit_lab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEnvStream = 0x656e76;      // contexts and reward noise
constexpr std::uint64_t kAgentStream = 0x6167656e74;
constexpr std::uint64_t kCodebookStream = 0x636f6465;

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("config field '" + field + "': " + what);
}

template <class T>
T get_field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

int get_count(const json& doc, const char* key) {
  const json& v = doc.at(key);
  require(v.is_number_integer(), key, "must be an integer");
  const auto x = v.get<long long>();
  require(x >= 1 && x <= std::numeric_limits<int>::max(), key, "must be >= 1");
  return static_cast<int>(x);
}

RateSchedule parse_schedule(const json& v) {
  if (v.is_number()) {
    require(v.get<double>() >= 0.0, "rate_schedule", "must be >= 0");
    return RateSchedule::constant(v.get<double>());
  }
  require(v.is_array() && !v.empty(), "rate_schedule", "must be a number or a nonempty array of segments");
  std::vector<RateSegment> segs;
  for (const json& seg : v) {
    require(seg.is_object() && seg.contains("start_round") && seg.contains("rate_bits") && seg.size() == 2,
            "rate_schedule", "segments need exactly {start_round, rate_bits}");
    require(seg["start_round"].is_number_integer(), "rate_schedule", "start_round must be an integer");
    require(seg["rate_bits"].is_number(), "rate_schedule", "rate_bits must be a number");
    segs.push_back({seg["start_round"].get<int>(), seg["rate_bits"].get<double>()});
  }
  try {
    return RateSchedule(std::move(segs));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config field 'rate_schedule': ") + e.what());
  }
}

const char* to_string(ClusterBitsMode m) {
  return m == ClusterBitsMode::kFloorBudget ? "floor_budget" : "ceil_target";
}

std::string kind_seed_name(const char* prefix, const RunResult& run) {
  return std::string(prefix) + "_" + to_string(run.kind) + "_" + std::to_string(run.seed) + ".csv";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void mean_std(const std::vector<double>& xs, double& mean, double& std_dev) {
  if (xs.empty()) throw DomainError("mean of empty sample");
  double total = 0.0;
  for (double x : xs) total += x;
  mean = total / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  std_dev = std::sqrt(sq / static_cast<double>(xs.size()));
}

void ExperimentConfig::validate() const {
  require(!name.empty(), "name", "must be nonempty");
  require(S >= 1, "S", "must be >= 1");
  require(K >= 1, "K", "must be >= 1");
  require(G >= 1, "G", "must be >= 1");
  require(N >= 1, "N", "must be >= 1");
  require(J >= 1, "J", "must be >= 1");
  require((S - 1) / G < K, "G", "groups need (S-1)/G < K distinct optimal arms");
  require(!rate_schedule.segments().empty(), "rate_schedule", "must be nonempty");
  require(!agent_kinds.empty(), "agent_kinds", "must be nonempty");
  require(!seeds.empty(), "seeds", "must be nonempty");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) require(seeds[i] != seeds[j], "seeds", "duplicate seed");
  }
  for (std::size_t i = 0; i < agent_kinds.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) require(agent_kinds[i] != agent_kinds[j], "agent_kinds", "duplicate kind");
  }
  require(mc_samples >= 1, "mc_samples", "must be >= 1");
  require(zeta_nats >= 0.0 && std::isfinite(zeta_nats), "zeta_nats", "must be finite and >= 0");
  require(epsilon_floor >= 0.0 && epsilon_floor < 1.0 / K, "epsilon_floor", "must lie in [0, 1/K)");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const char* const kKeys[] = {"name",       "S",           "K",          "G",
                                      "N",          "J",           "rate_schedule", "agent_kinds",
                                      "seeds",      "mc_samples",  "zeta_nats",  "epsilon_floor",
                                      "cluster_bits"};
  for (const auto& item : doc.items()) {
    const bool known = std::any_of(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError("config field '" + item.key() + "': unknown key");
  }
  for (const char* k : {"S", "K", "N", "J", "rate_schedule", "agent_kinds", "seeds"}) {
    require(doc.contains(k), k, "missing");
  }

  ExperimentConfig cfg;
  if (doc.contains("name")) cfg.name = get_field<std::string>(doc, "name");
  cfg.S = get_count(doc, "S");
  cfg.K = get_count(doc, "K");
  cfg.G = doc.contains("G") ? get_count(doc, "G") : 1;
  cfg.N = get_count(doc, "N");
  cfg.J = get_count(doc, "J");
  cfg.rate_schedule = parse_schedule(doc["rate_schedule"]);

  require(doc["agent_kinds"].is_array(), "agent_kinds", "must be an array");
  for (const json& k : doc["agent_kinds"]) {
    require(k.is_string(), "agent_kinds", "entries must be strings");
    try {
      cfg.agent_kinds.push_back(agent_kind_from_string(k.get<std::string>()));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config field 'agent_kinds': ") + e.what());
    }
  }
  require(doc["seeds"].is_array(), "seeds", "must be an array");
  for (const json& s : doc["seeds"]) {
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), "seeds",
            "entries must be non-negative integers");
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  if (doc.contains("mc_samples")) cfg.mc_samples = get_count(doc, "mc_samples");
  if (doc.contains("zeta_nats")) cfg.zeta_nats = get_field<double>(doc, "zeta_nats");
  if (doc.contains("epsilon_floor")) cfg.epsilon_floor = get_field<double>(doc, "epsilon_floor");
  if (doc.contains("cluster_bits")) {
    const auto mode = get_field<std::string>(doc, "cluster_bits");
    if (mode == "floor_budget") {
      cfg.cluster_bits = ClusterBitsMode::kFloorBudget;
    } else if (mode == "ceil_target") {
      cfg.cluster_bits = ClusterBitsMode::kCeilTargetRate;
    } else {
      throw ConfigError("config field 'cluster_bits': expected floor_budget or ceil_target");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["S"] = cfg.S;
  doc["K"] = cfg.K;
  doc["G"] = cfg.G;
  doc["N"] = cfg.N;
  doc["J"] = cfg.J;
  json segs = json::array();
  for (const RateSegment& s : cfg.rate_schedule.segments()) {
    segs.push_back({{"start_round", s.start_round}, {"rate_bits", s.rate_bits}});
  }
  doc["rate_schedule"] = segs;
  json kinds = json::array();
  for (AgentKind k : cfg.agent_kinds) kinds.push_back(to_string(k));
  doc["agent_kinds"] = kinds;
  doc["seeds"] = cfg.seeds;
  doc["mc_samples"] = cfg.mc_samples;
  doc["zeta_nats"] = cfg.zeta_nats;
  doc["epsilon_floor"] = cfg.epsilon_floor;
  doc["cluster_bits"] = to_string(cfg.cluster_bits);
  return doc.dump(2);
}

std::uint64_t seed_offset_from_env() {
  const char* raw = std::getenv(kSeedOffsetEnvVar);
  if (raw == nullptr || *raw == '\0') return 0;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0' || raw[0] == '-') {
    throw ConfigError(std::string(kSeedOffsetEnvVar) + " must be a non-negative integer, got '" + raw + "'");
  }
  return v;
}

void apply_seed_offset(ExperimentConfig& cfg, std::uint64_t offset) {
  for (auto& s : cfg.seeds) s += offset;
}

double system_regret_bound(long long S, long long K, long long N, long long T) {
  if (S < 1 || K < 1 || N < 1 || T < 1) throw DomainError("bound arguments must be >= 1");
  const double skn = static_cast<double>(S) * static_cast<double>(K) * static_cast<double>(N);
  const double t = static_cast<double>(T);
  return 2.0 * skn + 4.0 * std::sqrt((2.0 + 6.0 * std::log(t)) * skn * t);
}

RegretTrace RegretTrace::from_per_round(std::vector<double> regrets, int window) {
  if (window < 1) throw DomainError("smoothing window must be >= 1");
  RegretTrace tr;
  tr.per_virtual_round = std::move(regrets);
  const std::size_t n = tr.per_virtual_round.size();
  tr.cumulative.resize(n);
  tr.smoothed.resize(n);
  double run = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    run += tr.per_virtual_round[t];
    tr.cumulative[t] = run;
    // Window sums from the cumulative trace keep every entry a fixed function of the data.
    const std::size_t lo = t + 1 >= static_cast<std::size_t>(window) ? t + 1 - static_cast<std::size_t>(window) : 0;
    double sum = 0.0;
    for (std::size_t i = lo; i <= t; ++i) sum += tr.per_virtual_round[i];
    tr.smoothed[t] = sum / static_cast<double>(t + 1 - lo);
  }
  return tr;
}

SublinearityVerdict sublinearity_verdict(const RegretTrace& trace, int agents) {
  if (agents < 1) throw DomainError("agents must be >= 1");
  const std::size_t n = trace.per_virtual_round.size();
  if (n < 4 * static_cast<std::size_t>(agents) || n < 4) {
    throw DomainError("regret trace too short for a verdict: need >= 4N entries");
  }
  const std::size_t quarter = n / 4;
  double first = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) {
    first += trace.per_virtual_round[i];
    last += trace.per_virtual_round[n - quarter + i];
  }
  SublinearityVerdict v;
  v.q1 = first / static_cast<double>(quarter);
  v.q4 = last / static_cast<double>(quarter);
  v.sublinear = v.q4 <= 0.2 * v.q1 && v.q4 <= 0.05;
  return v;
}

const RunResult& ExperimentResult::run(AgentKind kind, std::uint64_t seed) const {
  for (const RunResult& r : runs) {
    if (r.kind == kind && r.seed == seed) return r;
  }
  throw DomainError(std::string("no run for kind ") + to_string(kind) + " seed " + std::to_string(seed));
}

std::vector<const RunResult*> ExperimentResult::runs_of(AgentKind kind) const {
  std::vector<const RunResult*> out;
  for (const RunResult& r : runs) {
    if (r.kind == kind) out.push_back(&r);
  }
  return out;
}

RunResult run_single(const ExperimentConfig& cfg, AgentKind kind, std::uint64_t seed) {
  cfg.validate();
  const EnvironmentSpec env = build_environment(cfg.S, cfg.K, cfg.G, seed);
  Rng env_rng(derive_seed(seed, kEnvStream));
  Rng agent_rng(derive_seed(derive_seed(seed, kAgentStream), static_cast<std::uint64_t>(kind)));
  ChannelState channel;
  channel.codebook_seed = derive_seed(derive_seed(seed, kCodebookStream), static_cast<std::uint64_t>(kind));
  channel.retransmit.threshold_nats = cfg.zeta_nats;

  RoundConfig rc;
  rc.agents = cfg.N;
  rc.mc_samples = cfg.mc_samples;
  rc.epsilon_floor = cfg.epsilon_floor;
  rc.cluster_bits_from_target = cfg.cluster_bits == ClusterBitsMode::kCeilTargetRate;

  RunResult result;
  result.kind = kind;
  result.seed = seed;
  result.rounds.reserve(static_cast<std::size_t>(cfg.J));
  std::vector<double> regrets;
  regrets.reserve(static_cast<std::size_t>(cfg.N) * static_cast<std::size_t>(cfg.J));

  PosteriorState post = init_posteriors(env.contexts(), env.arms());
  for (int j = 1; j <= cfg.J; ++j) {
    RoundOutcome out = run_round(env, post, kind, cfg.rate_schedule.budget_at(j), rc, env_rng, agent_rng, channel);
    const RoundTranscript& t = out.transcript;
    regrets.insert(regrets.end(), t.regrets.begin(), t.regrets.end());
    result.rate.per_round_target.push_back(t.target_rate_bits);
    result.rate.per_round_budget.push_back(t.budget_bits);
    result.rounds.push_back(RoundRecord{t.round, t.target_rate_bits, t.used_rate_bits, t.budget_bits,
                                        t.distortion_nats, t.codebook_retransmitted, t.codebook_cost_bits,
                                        t.sum_regret()});
    post = std::move(out.posterior);
  }
  result.regret = RegretTrace::from_per_round(std::move(regrets), cfg.N);
  if (result.regret.per_virtual_round.size() >= 4 * static_cast<std::size_t>(cfg.N)) {
    result.verdict = sublinearity_verdict(result.regret, cfg.N);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  if (workers < 1) throw ConfigError("workers must be >= 1");
  struct Job {
    AgentKind kind;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (AgentKind k : cfg.agent_kinds) {
    for (std::uint64_t s : cfg.seeds) jobs.push_back({k, s});
  }
  ExperimentResult result;
  result.config = cfg;
  result.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        result.runs[i] = run_single(cfg, jobs[i].kind, jobs[i].seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto pool_size = std::min<std::size_t>(static_cast<std::size_t>(workers), jobs.size());
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < pool_size; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

std::string transcript_csv(const RunResult& run) {
  std::string out = "round,kind,target_rate_bits,used_rate_bits,budget_bits,distortion_nats,codebook_retx,sum_regret_round\n";
  for (const RoundRecord& r : run.rounds) {
    out += std::to_string(r.round);
    out += ',';
    out += to_string(run.kind);
    for (double x : {r.target_rate_bits, r.used_rate_bits, r.budget_bits, r.distortion_nats}) {
      out += ',';
      out += format_double(x);
    }
    out += r.codebook_retx ? ",1," : ",0,";
    out += format_double(r.sum_regret_round);
    out += '\n';
  }
  return out;
}

std::string codebook_ledger_csv(const RunResult& run, int agents, int arms) {
  // Efficiency compares the uncompressed per-round action payload N log2 K
  // with B * P * log2 K for B index bits and P bits per probability.
  std::string out = "round,kind,codebook_retx,codebook_cost_bits,index_payload_bits,efficiency_ratio\n";
  const double log2k = std::log2(static_cast<double>(arms));
  for (const RoundRecord& r : run.rounds) {
    const double bits = r.used_rate_bits;
    const double denom = bits * kBitsPerProbability * log2k;
    const double ratio =
        denom > 0.0 ? agents * log2k / denom : std::numeric_limits<double>::infinity();
    out += std::to_string(r.round) + ',' + to_string(run.kind) + (r.codebook_retx ? ",1," : ",0,") +
           format_double(r.codebook_cost_bits) + ',' + format_double(agents * bits) + ',' + format_double(ratio) +
           '\n';
  }
  return out;
}

std::string summary_csv(const ExperimentResult& result) {
  std::string out = "kind,seed,final_cum_regret,q1,q4,verdict\n";
  for (const RunResult& r : result.runs) {
    out += std::string(to_string(r.kind)) + ',' + std::to_string(r.seed) + ',' + format_double(r.final_cum_regret());
    if (r.verdict) {
      out += ',' + format_double(r.verdict->q1) + ',' + format_double(r.verdict->q4) + ',' + r.verdict->label() + '\n';
    } else {
      out += ",,,too-short\n";
    }
  }
  return out;
}

std::string aggregate_csv(const ExperimentResult& result) {
  std::string out = "kind,round,seeds,mean_target_rate_bits,std_target_rate_bits,mean_sum_regret_round,std_sum_regret_round\n";
  for (AgentKind kind : result.config.agent_kinds) {
    const auto runs = result.runs_of(kind);
    if (runs.empty()) continue;
    const std::size_t rounds = runs.front()->rounds.size();
    std::vector<double> rate(runs.size());
    std::vector<double> regret(runs.size());
    for (std::size_t j = 0; j < rounds; ++j) {
      for (std::size_t i = 0; i < runs.size(); ++i) {
        rate[i] = runs[i]->rounds[j].target_rate_bits;
        regret[i] = runs[i]->rounds[j].sum_regret_round;
      }
      double rm, rs, gm, gs;
      mean_std(rate, rm, rs);
      mean_std(regret, gm, gs);
      out += std::string(to_string(kind)) + ',' + std::to_string(runs.front()->rounds[j].round) + ',' +
             std::to_string(runs.size()) + ',' + format_double(rm) + ',' + format_double(rs) + ',' +
             format_double(gm) + ',' + format_double(gs) + '\n';
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const RunResult& r : result.runs) {
    written.push_back(dir / kind_seed_name("trace", r));
    write_file(written.back(), transcript_csv(r));
    if (is_cluster(r.kind)) {
      written.push_back(dir / kind_seed_name("codebook", r));
      write_file(written.back(), codebook_ledger_csv(r, result.config.N, result.config.K));
    }
  }
  written.push_back(dir / "summary.csv");
  write_file(written.back(), summary_csv(result));
  written.push_back(dir / "aggregate.csv");
  write_file(written.back(), aggregate_csv(result));
  return written;
}

// ---------------------------------------------------------------------------
// SVG plots

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::size_t kMaxPoints = 800;

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Mean +- std across seeds of per-index vectors, downsampled to kMaxPoints.
Series band(const std::string& label, const std::vector<const std::vector<double>*>& curves, double x0, double dx) {
  Series s;
  s.label = label;
  const std::size_t n = curves.front()->size();
  const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
  std::vector<double> column(curves.size());
  for (std::size_t t = 0; t < n; t += stride) {
    for (std::size_t i = 0; i < curves.size(); ++i) column[i] = (*curves[i])[t];
    double m, sd;
    mean_std(column, m, sd);
    s.x.push_back(x0 + dx * static_cast<double>(t));
    s.mean.push_back(m);
    s.lo.push_back(m - sd);
    s.hi.push_back(m + sd);
  }
  return s;
}

std::string render(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                   const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = 0.0, ymax = 0.0;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.lo[i]);
      ymax = std::max(ymax, s.hi[i]);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  ymax *= 1.05;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"15\">" << xml_escape(title) << "</text>\n"
    << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"11\">" << num(xv) << "</text>\n"
      << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\" "
      << "font-family=\"sans-serif\" font-size=\"11\">" << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10) << "\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(xlabel) << "</text>\n"
    << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"12\" transform=\"rotate(-90 16 " << num(kTop + ph / 2) << ")\">" << xml_escape(ylabel)
    << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << num(px(s.x[i])) << ',' << num(py(s.hi[i])) << ' ';
    for (std::size_t i = s.x.size(); i-- > 0;) o << num(px(s.x[i])) << ',' << num(py(s.lo[i])) << ' ';
    o << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << num(px(s.x[i])) << ',' << num(py(s.mean[i])) << ' ';
    o << "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << num(kWidth - kRight + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kWidth - kRight + 32)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << num(kWidth - kRight + 38) << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const ExperimentResult& result, const std::filesystem::path& dir) {
  if (result.runs.empty()) throw DomainError("no traces to plot");
  for (const RunResult& r : result.runs) {
    if (r.rounds.empty() || r.regret.smoothed.empty()) throw DomainError("cannot plot an empty trace");
  }
  std::filesystem::create_directories(dir);
  std::vector<Series> rate_series;
  std::vector<Series> regret_series;
  for (AgentKind kind : result.config.agent_kinds) {
    const auto runs = result.runs_of(kind);
    if (runs.empty()) continue;
    std::vector<const std::vector<double>*> rates;
    std::vector<const std::vector<double>*> regrets;
    for (const RunResult* r : runs) {
      rates.push_back(&r->rate.per_round_target);
      regrets.push_back(&r->regret.smoothed);
    }
    rate_series.push_back(band(display_name(kind), rates, 1.0, 1.0));
    regret_series.push_back(band(display_name(kind), regrets, 1.0, 1.0));
  }
  // Budget line from the first run (identical across runs of a non-Perfect kind).
  for (const RunResult& r : result.runs) {
    if (r.kind == AgentKind::kPerfect) continue;
    std::vector<const std::vector<double>*> budget{&r.rate.per_round_budget};
    rate_series.push_back(band("budget", budget, 1.0, 1.0));
    break;
  }
  const std::string& name = result.config.name;
  std::vector<std::filesystem::path> out{dir / ("rate_" + name + ".svg"), dir / ("regret_" + name + ".svg")};
  write_file(out[0], render(name + ": target rate", "system round j", "rate (bits)", rate_series));
  write_file(out[1], render(name + ": smoothed regret", "virtual round t", "regret per step", regret_series));
  return out;
}

}  // namespace bandit_lab
