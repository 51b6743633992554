#include "qvote/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "qvote/params.hpp"

namespace qvote {

using nlohmann::json;

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ThresholdAbort*>(&error)) return kExitThresholdAbort;
  if (dynamic_cast<const AnonAbort*>(&error)) return kExitAnonAbort;
  if (dynamic_cast<const RetryAbort*>(&error)) return kExitRetryAbort;
  if (dynamic_cast<const ConfigError*>(&error)) return kExitConfig;
  return kExitIo;
}

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

const json& require(const json& j, const std::string& key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(ctx + "." + key + ": missing field");
  return *it;
}

int require_int(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = require(j, key, ctx);
  if (!v.is_number_integer()) throw ConfigError(ctx + "." + key + ": expected an integer");
  return v.get<int>();
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = require(j, key, ctx);
  if (!v.is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
  return v.get<double>();
}

void check_schema(const json& j, const std::string& path, const std::string& kind) {
  const int version = require_int(j, "schema_version", path);
  if (version != kSchemaVersion) {
    throw ConfigError(path + ".schema_version: unsupported version " + std::to_string(version));
  }
  const json& k = require(j, "kind", path);
  if (!k.is_string() || k.get<std::string>() != kind) {
    throw ConfigError(path + ".kind: expected \"" + kind + "\"");
  }
}

ElectionConfig pool_from_json(const json& j, const std::string& ctx) {
  ElectionConfig cfg;
  cfg.n_agents = require_int(j, "n_agents", ctx);
  cfg.n_candidates = require_int(j, "n_candidates", ctx);
  cfg.pe_rounds = require_int(j, "pe_rounds", ctx);
  cfg.coin_count = require_int(j, "coin_count", ctx);
  cfg.failure_threshold = require_number(j, "failure_threshold", ctx);
  cfg.anon_security = require_int(j, "anon_security", ctx);

  const json& votes = require(j, "votes", ctx);
  if (!votes.is_array()) throw ConfigError(ctx + ".votes: expected an array");
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (!votes[i].is_number_integer()) {
      throw ConfigError(ctx + ".votes[" + std::to_string(i) + "]: expected an integer");
    }
    cfg.votes.push_back(votes[i].get<int>());
  }

  const json& noise = require(j, "noise", ctx);
  const json& kind = require(noise, "kind", ctx + ".noise");
  if (!kind.is_string()) throw ConfigError(ctx + ".noise.kind: expected a string");
  const std::string kind_s = kind.get<std::string>();
  if (kind_s == "ideal") {
    cfg.noise.kind = NoiseKind::Ideal;
  } else if (kind_s == "white") {
    cfg.noise.kind = NoiseKind::White;
    cfg.noise.weight = require_number(noise, "weight", ctx + ".noise");
  } else {
    throw ConfigError(ctx + ".noise.kind: unknown kind \"" + kind_s + "\"");
  }

  const json& seed = require(j, "seed", ctx);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ConfigError(ctx + ".seed: expected an integer");
  }
  cfg.seed = seed.get<std::uint64_t>();

  if (j.contains("retry")) {
    const json& r = j["retry"];
    cfg.retry.subround_attempts = require_int(r, "subround_attempts", ctx + ".retry");
    cfg.retry.threshold_restarts = require_int(r, "threshold_restarts", ctx + ".retry");
  }
  if (j.contains("anon_retry")) {
    const json& r = j["anon_retry"];
    cfg.anon_retry.round_retries = require_int(r, "round_retries", ctx + ".anon_retry");
    cfg.anon_retry.collision_retries = require_int(r, "collision_retries", ctx + ".anon_retry");
    cfg.anon_retry.redraw_retries = require_int(r, "redraw_retries", ctx + ".anon_retry");
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  return cfg;
}

json pool_to_json(const ElectionConfig& cfg) {
  json j;
  j["n_agents"] = cfg.n_agents;
  j["n_candidates"] = cfg.n_candidates;
  j["pe_rounds"] = cfg.pe_rounds;
  j["coin_count"] = cfg.coin_count;
  j["failure_threshold"] = cfg.failure_threshold;
  j["anon_security"] = cfg.anon_security;
  j["votes"] = cfg.votes;
  if (cfg.noise.kind == NoiseKind::Ideal) {
    j["noise"] = {{"kind", "ideal"}};
  } else {
    j["noise"] = {{"kind", "white"}, {"weight", cfg.noise.weight}};
  }
  j["seed"] = cfg.seed;
  j["retry"] = {{"subround_attempts", cfg.retry.subround_attempts},
                {"threshold_restarts", cfg.retry.threshold_restarts}};
  j["anon_retry"] = {{"round_retries", cfg.anon_retry.round_retries},
                     {"collision_retries", cfg.anon_retry.collision_retries},
                     {"redraw_retries", cfg.anon_retry.redraw_retries}};
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

std::vector<ElectionConfig> load_config(const std::string& path) {
  const json j = load_json(path);
  check_schema(j, path, "election");
  const json& pools = require(j, "pools", path);
  if (!pools.is_array() || pools.empty()) {
    throw ConfigError(path + ".pools: expected a non-empty array");
  }
  std::vector<ElectionConfig> out;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    out.push_back(pool_from_json(pools[i], path + ".pools[" + std::to_string(i) + "]"));
  }
  return out;
}

void save_config(const std::string& path, const std::vector<ElectionConfig>& pools) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "election";
  j["pools"] = json::array();
  for (const auto& cfg : pools) j["pools"].push_back(pool_to_json(cfg));
  write_text(path, j.dump(2) + "\n");
}

Fixture load_fixture(const std::string& path) {
  const json j = load_json(path);
  check_schema(j, path, "fixture");
  Fixture fx;
  if (j.contains("name")) fx.name = j["name"].get<std::string>();
  const json& pools = require(j, "pools", path);
  if (!pools.is_array() || pools.empty()) {
    throw ConfigError(path + ".pools: expected a non-empty array");
  }
  for (std::size_t pi = 0; pi < pools.size(); ++pi) {
    const std::string ctx = path + ".pools[" + std::to_string(pi) + "]";
    const json& pj = pools[pi];
    FixturePool pool;
    pool.n_agents = require_int(pj, "n_agents", ctx);
    pool.n_candidates = require_int(pj, "n_candidates", ctx);
    pool.digit_rounds = require_int(pj, "digit_rounds", ctx);
    pool.pe_rounds = require_int(pj, "pe_rounds", ctx);
    if (pool.n_agents < 1 || pool.digit_rounds < 1 || pool.pe_rounds < 1) {
      throw ConfigError(ctx + ": sizes must be positive");
    }
    if (pj.contains("voting_order")) {
      pool.voting_order = pj["voting_order"].get<std::vector<int>>();
    }

    pool.board = BulletinBoard(pool.digit_rounds, pool.pe_rounds, pool.n_agents);
    const json& subs = require(pj, "sub_bulletins", ctx);
    if (!subs.is_array()) throw ConfigError(ctx + ".sub_bulletins: expected an array");
    for (std::size_t si = 0; si < subs.size(); ++si) {
      const std::string sctx = ctx + ".sub_bulletins[" + std::to_string(si) + "]";
      const json& sj = subs[si];
      const int digit = require_int(sj, "digit", sctx) - 1;  // files are 1-based like the figures
      const int pe = require_int(sj, "pe", sctx) - 1;
      if (digit < 0 || digit >= pool.digit_rounds || pe < 0 || pe >= pool.pe_rounds) {
        throw ConfigError(sctx + ": (digit, pe) outside the grid");
      }
      const json& rows = require(sj, "rows", sctx);
      if (!rows.is_array() || rows.size() != static_cast<std::size_t>(pool.n_agents)) {
        throw ConfigError(sctx + ".rows: expected " + std::to_string(pool.n_agents) + " rows");
      }
      SubBulletin& sb = pool.board.at(digit, pe);
      for (int r = 0; r < pool.n_agents; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(pool.n_agents)) {
          throw ConfigError(sctx + ".rows[" + std::to_string(r) + "]: expected " +
                            std::to_string(pool.n_agents) + " bits");
        }
        for (int c = 0; c < pool.n_agents; ++c) {
          const int bit = row[static_cast<std::size_t>(c)].get<int>();
          if (bit != 0 && bit != 1) {
            throw ConfigError(sctx + ".rows[" + std::to_string(r) + "][" + std::to_string(c) +
                              "]: bits must be 0 or 1");
          }
          sb.rows.at(r, c) = static_cast<std::uint8_t>(bit);
        }
        sb.row_filled[static_cast<std::size_t>(r)] = 1;
      }
    }
    if (!pool.board.complete()) {
      throw ConfigError(ctx + ": sub-bulletin grid is incomplete");
    }

    pool.published_e.assign(
        static_cast<std::size_t>(pool.digit_rounds) * pool.pe_rounds * pool.n_agents,
        std::nullopt);
    if (pj.contains("published_election_vectors")) {
      const json& evs = pj["published_election_vectors"];
      for (std::size_t ei = 0; ei < evs.size(); ++ei) {
        const std::string ectx = ctx + ".published_election_vectors[" + std::to_string(ei) + "]";
        const int digit = require_int(evs[ei], "digit", ectx) - 1;
        const int pe = require_int(evs[ei], "pe", ectx) - 1;
        const json& bits = require(evs[ei], "bits", ectx);
        if (!bits.is_array() || bits.size() != static_cast<std::size_t>(pool.n_agents)) {
          throw ConfigError(ectx + ".bits: expected " + std::to_string(pool.n_agents) + " bits");
        }
        for (int n = 0; n < pool.n_agents; ++n) {
          pool.published_e[(static_cast<std::size_t>(digit) * pool.pe_rounds + pe) * pool.n_agents +
                           n] = static_cast<std::uint8_t>(bits[static_cast<std::size_t>(n)].get<int>());
        }
      }
    }
    if (pj.contains("published_tally")) {
      pool.published_tally = pj["published_tally"].get<std::vector<int>>();
    }
    if (pj.contains("caption_votes")) {
      pool.caption_votes = pj["caption_votes"].get<std::vector<int>>();
    }
    fx.pools.push_back(std::move(pool));
  }
  if (j.contains("published_merged_tally")) {
    fx.published_merged_tally = j["published_merged_tally"].get<std::vector<int>>();
  }
  return fx;
}

ReplayResult replay_fixture(const std::string& path) { return replay_fixture(load_fixture(path)); }

ReplayResult replay_fixture(const Fixture& fixture) {
  ReplayResult res;
  int candidates = 0;
  for (const auto& pool : fixture.pools) candidates = std::max(candidates, pool.n_candidates);
  res.merged.counts.assign(static_cast<std::size_t>(candidates), 0);

  for (std::size_t pi = 0; pi < fixture.pools.size(); ++pi) {
    const FixturePool& pool = fixture.pools[pi];
    ReplayPoolResult pr;
    pr.recomputed = compute_election_vectors(pool.board);

    // The published election vectors are part of the record; they drive the
    // decode, and any disagreement with the bulletin parities is reported.
    pr.effective = pr.recomputed;
    for (int k = 0; k < pool.digit_rounds; ++k) {
      for (int p = 0; p < pool.pe_rounds; ++p) {
        for (int n = 0; n < pool.n_agents; ++n) {
          const std::size_t idx =
              (static_cast<std::size_t>(k) * pool.pe_rounds + p) * pool.n_agents + n;
          if (!pool.published_e[idx]) continue;
          const std::uint8_t published = *pool.published_e[idx];
          if (published != pr.recomputed.e[idx]) {
            res.discrepancies.push_back({"election_vector_mismatch", static_cast<int>(pi), k + 1,
                                         p + 1, n + 1, pr.recomputed.e[idx], published});
          }
          pr.effective.e[idx] = published;
        }
      }
    }
    // Rebuild the final bits from the effective vectors.
    std::fill(pr.effective.final_bits.begin(), pr.effective.final_bits.end(), 0);
    for (int k = 0; k < pool.digit_rounds; ++k) {
      for (int p = 0; p < pool.pe_rounds; ++p) {
        for (int n = 0; n < pool.n_agents; ++n) {
          pr.effective.final_bits[static_cast<std::size_t>(n) * pool.digit_rounds + k] ^=
              pr.effective.row_parity(k, p, n);
        }
      }
    }

    pr.tally = compute_tally(pr.effective, pool.n_candidates);

    if (!pool.caption_votes.empty()) {
      for (int n = 0; n < pool.n_agents; ++n) {
        const int decoded = pr.tally.election_vector[static_cast<std::size_t>(n)];
        const int printed = pool.caption_votes[static_cast<std::size_t>(n)];
        if (decoded != printed) {
          res.discrepancies.push_back(
              {"caption_vote_mismatch", static_cast<int>(pi), -1, -1, n + 1, decoded, printed});
        }
      }
    }
    if (!pool.published_tally.empty()) {
      for (std::size_t v = 0; v < pool.published_tally.size(); ++v) {
        const int computed =
            v < pr.tally.counts.size() ? pr.tally.counts[v] : 0;
        if (computed != pool.published_tally[v]) {
          res.discrepancies.push_back({"tally_mismatch", static_cast<int>(pi), -1, -1,
                                       static_cast<int>(v), computed, pool.published_tally[v]});
        }
      }
    }

    for (std::size_t v = 0; v < pr.tally.counts.size(); ++v) res.merged.counts[v] += pr.tally.counts[v];
    res.merged.invalid += pr.tally.invalid;
    res.merged.election_vector.insert(res.merged.election_vector.end(),
                                      pr.tally.election_vector.begin(),
                                      pr.tally.election_vector.end());
    res.pools.push_back(std::move(pr));
  }

  if (!fixture.published_merged_tally.empty()) {
    for (std::size_t v = 0; v < fixture.published_merged_tally.size(); ++v) {
      const int computed = v < res.merged.counts.size() ? res.merged.counts[v] : 0;
      if (computed != fixture.published_merged_tally[v]) {
        res.discrepancies.push_back({"tally_mismatch", -1, -1, -1, static_cast<int>(v), computed,
                                     fixture.published_merged_tally[v]});
      }
    }
  }
  return res;
}

namespace {

json vectors_to_json(const ElectionVectors& v) {
  json out = json::array();
  for (int k = 0; k < v.digit_rounds; ++k) {
    for (int p = 0; p < v.pe_rounds; ++p) {
      json bits = json::array();
      for (int n = 0; n < v.n_agents; ++n) bits.push_back(static_cast<int>(v.row_parity(k, p, n)));
      out.push_back({{"digit", k + 1}, {"pe", p + 1}, {"bits", bits}});
    }
  }
  return out;
}

json tally_to_json(const Tally& t) {
  return {{"counts", t.counts}, {"invalid", t.invalid}, {"election_vector", t.election_vector}};
}

}  // namespace

std::string replay_report_json(const Fixture& fixture, const ReplayResult& result) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "replay";
  j["fixture"] = fixture.name;
  j["pools"] = json::array();
  for (std::size_t pi = 0; pi < result.pools.size(); ++pi) {
    const auto& pr = result.pools[pi];
    json pj;
    pj["pool"] = static_cast<int>(pi);
    pj["decoded_votes"] = pr.tally.election_vector;
    pj["tally"] = tally_to_json(pr.tally);
    pj["recomputed_election_vectors"] = vectors_to_json(pr.recomputed);
    pj["effective_election_vectors"] = vectors_to_json(pr.effective);
    j["pools"].push_back(pj);
  }
  j["merged_tally"] = tally_to_json(result.merged);
  j["discrepancies"] = json::array();
  for (const auto& d : result.discrepancies) {
    j["discrepancies"].push_back({{"kind", d.kind},
                                  {"pool", d.pool},
                                  {"digit", d.digit},
                                  {"pe", d.pe},
                                  {"slot", d.slot},
                                  {"computed", d.computed},
                                  {"published", d.published}});
  }
  return j.dump(2) + "\n";
}

void write_bulletin_json(const std::string& path, const PoolsResult& result) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "bulletin";
  j["pools"] = json::array();
  for (std::size_t pi = 0; pi < result.pools.size(); ++pi) {
    const auto& pool = result.pools[pi];
    json pj;
    pj["pool"] = static_cast<int>(pi);
    pj["voting_order"] = pool.voting_order;
    pj["grid"] = json::array();
    for (int k = 0; k < pool.board.digit_rounds; ++k) {
      for (int p = 0; p < pool.board.pe_rounds; ++p) {
        const SubBulletin& sb = pool.board.at(k, p);
        json rows = json::array();
        for (int n = 0; n < pool.board.n_agents; ++n) {
          json row = json::array();
          for (int c = 0; c < pool.board.n_agents; ++c) row.push_back(static_cast<int>(sb.rows.at(n, c)));
          rows.push_back(row);
        }
        pj["grid"].push_back({{"digit", k + 1}, {"pe", p + 1}, {"rows", rows}});
      }
    }
    pj["election_vectors"] = vectors_to_json(pool.vectors);
    j["pools"].push_back(pj);
  }
  write_text(path, j.dump(2) + "\n");
}

void write_tally_json(const std::string& path, const PoolsResult& result) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "tally";
  j["pools"] = json::array();
  for (std::size_t pi = 0; pi < result.pools.size(); ++pi) {
    json pj = tally_to_json(result.pools[pi].tally);
    pj["pool"] = static_cast<int>(pi);
    j["pools"].push_back(pj);
  }
  j["merged"] = tally_to_json(result.merged);
  write_text(path, j.dump(2) + "\n");
}

void write_plan_json(const std::string& path, const SecurityPlan& plan) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "plan";
  j["epsilon"] = plan.epsilon;
  j["coin_count"] = plan.coin_count;
  j["pe_rounds"] = plan.pe_rounds;
  j["samples_required"] = plan.samples_required;
  j["soundness"] = plan.soundness;
  j["confidence"] = plan.confidence;
  j["success_probability"] = plan.success_probability;
  j["eta"] = plan.eta;
  j["zeta_round"] = plan.zeta_round;
  j["zeta_composed"] = plan.zeta_composed;
  j["zeta_clamped"] = plan.zeta_clamped;
  j["cost"] = plan.cost;
  j["table"] = json::array();
  for (const auto& row : plan.table) {
    j["table"].push_back({{"epsilon", row.epsilon},
                          {"coin_count", row.coin_count},
                          {"pe_rounds", row.pe_rounds},
                          {"zeta_round", row.zeta_round},
                          {"cost", row.cost},
                          {"feasible", row.feasible}});
  }
  write_text(path, j.dump(2) + "\n");
}

namespace {

int max_agents(const std::vector<const RunStats*>& pools) {
  std::size_t n = 0;
  for (const auto* s : pools) {
    for (const auto& ev : s->events) n = std::max(n, ev.deltas.size());
    for (const auto& su : s->summaries) n = std::max(n, su.deltas.size());
  }
  return static_cast<int>(n);
}

void append_double(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  line += buf;
}

}  // namespace

void emit_stats(const std::vector<const RunStats*>& pools, const std::string& dir) {
  const int n = max_agents(pools);

  std::string events = "pool,k,p,n,subround_type,verifier,verdict";
  for (int j = 1; j <= n; ++j) events += ",delta_" + std::to_string(j);
  events += "\n";
  for (std::size_t pi = 0; pi < pools.size(); ++pi) {
    for (const auto& ev : pools[pi]->events) {
      std::string line = std::to_string(ev.pool) + "," + std::to_string(ev.digit + 1) + "," +
                         std::to_string(ev.pe + 1) + "," + std::to_string(ev.slot + 1) + ",";
      line += ev.type == SubroundType::Verification ? "verification" : "vote";
      line += ",";
      if (ev.verifier >= 0) line += std::to_string(ev.verifier + 1);
      line += ",";
      line += ev.verdict == Verdict::Accept ? "accept" : "reject";
      for (int j = 0; j < n; ++j) {
        line += ",";
        if (j < static_cast<int>(ev.deltas.size())) append_double(line, ev.deltas[static_cast<std::size_t>(j)]);
      }
      events += line + "\n";
    }
  }
  write_text(dir + "/stats.csv", events);

  std::string summary = "pool,k,p";
  for (int j = 1; j <= n; ++j) summary += ",t_" + std::to_string(j);
  for (int j = 1; j <= n; ++j) summary += ",r_" + std::to_string(j);
  for (int j = 1; j <= n; ++j) summary += ",delta_" + std::to_string(j);
  summary += ",pooled_delta\n";
  for (std::size_t pi = 0; pi < pools.size(); ++pi) {
    for (const auto& su : pools[pi]->summaries) {
      std::string line = std::to_string(su.pool) + "," + std::to_string(su.digit + 1) + "," +
                         std::to_string(su.pe + 1);
      for (int j = 0; j < n; ++j) {
        line += ",";
        if (j < static_cast<int>(su.trials.size())) line += std::to_string(su.trials[static_cast<std::size_t>(j)]);
      }
      for (int j = 0; j < n; ++j) {
        line += ",";
        if (j < static_cast<int>(su.rejections.size())) {
          line += std::to_string(su.rejections[static_cast<std::size_t>(j)]);
        }
      }
      for (int j = 0; j < n; ++j) {
        line += ",";
        if (j < static_cast<int>(su.deltas.size())) append_double(line, su.deltas[static_cast<std::size_t>(j)]);
      }
      line += ",";
      append_double(line, su.pooled_delta);
      summary += line + "\n";
    }
  }
  write_text(dir + "/stats_summary.csv", summary);
}

void emit_stats(const RunStats& stats, const std::string& dir) {
  emit_stats(std::vector<const RunStats*>{&stats}, dir);
}

}  // namespace qvote
