#ifndef REPBAYES_IO_HPP
#define REPBAYES_IO_HPP

// Study ingestion from CSV, batch analysis producing results-table rows, and
// emission of plot-ready curve data. CSV schemas (headers are mandatory,
// lines starting with '#' are comments):
//   correlation: id,r_o,n_o,r_r,n_r
//   summary:     id,est_o,se_o,est_r,se_r
//   smd:         id,t_o,n1_o,n2_o,t_r,n1_r,n2_r,paired
//   binomial:    id,x1_o,n1_o,x2_o,n2_o,x1_r,n1_r,x2_r,n2_r

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "repbayes/exact_models.hpp"
#include "repbayes/format.hpp"
#include "repbayes/frequentist.hpp"
#include "repbayes/normal_model.hpp"

namespace repbayes::io {

/// Fatal input-format problem (bad header, unreadable file).
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct CorrelationData {
  double r_o;
  int n_o;
  double r_r;
  int n_r;
};

struct SummaryData {
  double est_o, se_o, est_r, se_r;
};

struct SmdPair {
  exact::SmdData original, replication;
};

struct BinomialPair {
  exact::BinomialData original, replication;
};

struct StudyRecord {
  std::string id;
  std::variant<CorrelationData, SummaryData, SmdPair, BinomialPair> data;
};

/// Fisher z-transformation of a correlation: atanh(r) with standard error
/// 1/sqrt(n-3).
inline normal::StudySummary fisher_transform(double r, int n) {
  if (!(std::abs(r) < 1.0))
    throw std::domain_error("fisher_transform: |r| must be < 1");
  if (n < 4) throw std::domain_error("fisher_transform: n must be >= 4");
  return normal::StudySummary{std::atanh(r), 1.0 / std::sqrt(n - 3.0)};
}

struct RowDiagnostic {
  int line;
  std::string message;
};

struct LoadResult {
  std::vector<StudyRecord> records;
  std::vector<RowDiagnostic> diagnostics;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  }
  return out;
}

inline double parse_num(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

inline bool parse_flag(const std::string& s) {
  if (s == "1" || s == "true" || s == "TRUE") return true;
  if (s == "0" || s == "false" || s == "FALSE") return false;
  throw std::invalid_argument("expected 0/1/true/false, got '" + s + "'");
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

}  // namespace detail

/// Parses one CSV file of study records. The header row selects the schema.
/// Malformed rows become diagnostics, not failures; a malformed header is
/// fatal.
inline LoadResult load_studies(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  LoadResult out;
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  enum class Kind { correlation, summary, smd, binomial } kind{};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = detail::split_csv_line(line);
    if (header.empty()) {
      header = cells;
      const std::string h = detail::join(cells);
      if (h == "id,r_o,n_o,r_r,n_r") kind = Kind::correlation;
      else if (h == "id,est_o,se_o,est_r,se_r") kind = Kind::summary;
      else if (h == "id,t_o,n1_o,n2_o,t_r,n1_r,n2_r,paired") kind = Kind::smd;
      else if (h == "id,x1_o,n1_o,x2_o,n2_o,x1_r,n1_r,x2_r,n2_r") kind = Kind::binomial;
      else throw format_error(path + ": unrecognised header '" + h + "'");
      continue;
    }
    try {
      if (cells.size() != header.size())
        throw std::invalid_argument("expected " + std::to_string(header.size()) +
                                    " fields, got " + std::to_string(cells.size()));
      StudyRecord rec;
      rec.id = cells[0];
      switch (kind) {
        case Kind::correlation: {
          const CorrelationData d{detail::parse_num(cells[1]), detail::parse_int(cells[2]),
                                  detail::parse_num(cells[3]), detail::parse_int(cells[4])};
          fisher_transform(d.r_o, d.n_o);  // validates
          fisher_transform(d.r_r, d.n_r);
          rec.data = d;
          break;
        }
        case Kind::summary: {
          const SummaryData d{detail::parse_num(cells[1]), detail::parse_num(cells[2]),
                              detail::parse_num(cells[3]), detail::parse_num(cells[4])};
          if (!(d.se_o > 0.0) || !(d.se_r > 0.0))
            throw std::invalid_argument("standard errors must be positive");
          rec.data = d;
          break;
        }
        case Kind::smd: {
          const bool paired = detail::parse_flag(cells[7]);
          auto mk = [&](double t, int n1, int n2) {
            return paired ? exact::SmdData::paired_design(t, n1)
                          : exact::SmdData::two_sample(t, n1, n2);
          };
          rec.data = SmdPair{mk(detail::parse_num(cells[1]), detail::parse_int(cells[2]),
                                detail::parse_int(cells[3])),
                             mk(detail::parse_num(cells[4]), detail::parse_int(cells[5]),
                                detail::parse_int(cells[6]))};
          break;
        }
        case Kind::binomial: {
          rec.data = BinomialPair{
              exact::BinomialData(detail::parse_int(cells[1]), detail::parse_int(cells[2]),
                                  detail::parse_int(cells[3]), detail::parse_int(cells[4])),
              exact::BinomialData(detail::parse_int(cells[5]), detail::parse_int(cells[6]),
                                  detail::parse_int(cells[7]), detail::parse_int(cells[8]))};
          break;
        }
      }
      out.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      out.diagnostics.push_back({line_no, e.what()});
    }
  }
  if (header.empty()) throw format_error(path + ": missing header row");
  return out;
}

// ---------------------------------------------------------------------------
// Batch analysis
// ---------------------------------------------------------------------------

/// One results-table row. Raw values are kept on their natural scales; the
/// display strings come from fmt::.
struct AnalysisRow {
  std::string id;
  double c = std::numeric_limits<double>::quiet_NaN();
  double d = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
  normal::BayesFactorValue min_bf_o, min_bf_r;
  double p_tilde_s = std::numeric_limits<double>::quiet_NaN();
  normal::BayesFactorValue bf_s, bf_r;
  std::optional<normal::BayesFactorValue> bf_s_exact, bf_r_exact;
  std::optional<normal::BayesFactorValue> bf_sa_at_g;  // diagnostics column
  std::string note;
};

struct AnalyzeOptions {
  double gamma = 1.0 / 3.0;
  bool truncate = false;
  bool exact = false;
};

namespace detail {

inline std::pair<normal::StudySummary, normal::StudySummary> to_summaries(
    const StudyRecord& rec) {
  if (const auto* c = std::get_if<CorrelationData>(&rec.data))
    return {fisher_transform(c->r_o, c->n_o), fisher_transform(c->r_r, c->n_r)};
  if (const auto* s = std::get_if<SummaryData>(&rec.data))
    return {normal::StudySummary{s->est_o, s->se_o},
            normal::StudySummary{s->est_r, s->se_r}};
  if (const auto* m = std::get_if<SmdPair>(&rec.data)) {
    const auto ao = exact::normal_approx(m->original);
    const auto ar = exact::normal_approx(m->replication);
    return {normal::StudySummary{ao.estimate, ao.std_error},
            normal::StudySummary{ar.estimate, ar.std_error}};
  }
  const auto& b = std::get<BinomialPair>(rec.data);
  const auto ao = exact::normal_approx(b.original);
  const auto ar = exact::normal_approx(b.replication);
  return {normal::StudySummary{ao.estimate, ao.std_error},
          normal::StudySummary{ar.estimate, ar.std_error}};
}

inline std::optional<std::pair<exact::ExactData, exact::ExactData>> to_exact(
    const StudyRecord& rec) {
  if (const auto* m = std::get_if<SmdPair>(&rec.data))
    return std::make_pair(exact::ExactData{m->original}, exact::ExactData{m->replication});
  if (const auto* b = std::get_if<BinomialPair>(&rec.data))
    return std::make_pair(exact::ExactData{b->original}, exact::ExactData{b->replication});
  return std::nullopt;
}

}  // namespace detail

/// Computes the full results-table row set. Records sharing an id merge:
/// a correlation or summary record provides the normal-approximation
/// columns, an smd or binomial record the exact-likelihood columns (and the
/// normal columns too when it is the only record). Output order follows
/// first appearance in the input.
inline std::vector<AnalysisRow> analyze(const std::vector<StudyRecord>& records,
                                        const AnalyzeOptions& options = {}) {
  std::vector<std::string> order;
  std::map<std::string, const StudyRecord*> normal_rec;
  std::map<std::string, const StudyRecord*> exact_rec;
  for (const auto& rec : records) {
    if (!normal_rec.count(rec.id) && !exact_rec.count(rec.id))
      order.push_back(rec.id);
    const bool is_exact = std::holds_alternative<SmdPair>(rec.data) ||
                          std::holds_alternative<BinomialPair>(rec.data);
    auto& slot = is_exact ? exact_rec : normal_rec;
    if (!slot.count(rec.id)) slot[rec.id] = &rec;
  }

  std::vector<AnalysisRow> rows;
  rows.reserve(order.size());
  for (const auto& id : order) {
    AnalysisRow row;
    row.id = id;
    const StudyRecord* base =
        normal_rec.count(id) ? normal_rec[id] : exact_rec[id];
    try {
      const auto [orig, rep] = detail::to_summaries(*base);
      const auto pair = normal::derive_pair(orig, rep);
      row.c = pair.c;
      row.d = pair.d;
      row.q = normal::q_statistic(pair);
      row.min_bf_o = normal::min_bf(pair.z_o);
      row.min_bf_r = normal::min_bf(pair.z_r);
      row.p_tilde_s = (pair.z_r == 0.0)
                          ? std::numeric_limits<double>::quiet_NaN()
                          : normal::sceptical_p(pair, true);
      row.bf_s = normal::sceptical_bf(pair, options.truncate);
      row.bf_r = normal::replication_bf(pair, options.truncate);
      const auto g = normal::sufficiently_sceptical_g(pair.z_o,
                                                      normal::Level{options.gamma});
      if (g) {
        row.bf_sa_at_g = options.truncate ? normal::bf_sa_truncated(pair, g->g)
                                          : normal::bf_sa(pair, g->g);
      }
    } catch (const std::exception& e) {
      row.note = e.what();
      rows.push_back(std::move(row));
      continue;
    }
    if (options.exact && exact_rec.count(id)) {
      try {
        const auto ex = detail::to_exact(*exact_rec[id]);
        row.bf_s_exact = exact::exact_sceptical_bf(ex->first, ex->second).bf;
        row.bf_r_exact = exact::exact_replication_bf(ex->first, ex->second);
      } catch (const std::exception& e) {
        row.note = std::string("exact: ") + e.what();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization of analysis rows
// ---------------------------------------------------------------------------

inline const char* analysis_csv_header() {
  return "id,c,d,Q,minBF_o,minBF_r,p_tilde_S,BF_S,BF_S_exact,BF_R,BF_R_exact,"
         "BF_SA_at_gamma,note";
}

inline std::vector<std::string> analysis_row_cells(const AnalysisRow& r) {
  auto opt_bf = [](const std::optional<normal::BayesFactorValue>& v) {
    return v ? fmt::format_bf(*v) : std::string{};
  };
  return {r.id,
          fmt::format_fixed(r.c, 2),
          fmt::format_fixed(r.d, 2),
          fmt::format_fixed(r.q, 2),
          fmt::format_bf(r.min_bf_o),
          fmt::format_bf(r.min_bf_r),
          fmt::format_p(r.p_tilde_s),
          fmt::format_bf(r.bf_s),
          opt_bf(r.bf_s_exact),
          fmt::format_bf(r.bf_r),
          opt_bf(r.bf_r_exact),
          opt_bf(r.bf_sa_at_g),
          r.note};
}

inline std::string to_csv(const std::vector<AnalysisRow>& rows) {
  std::string out = analysis_csv_header();
  out += "\n";
  for (const auto& r : rows) {
    const auto cells = analysis_row_cells(r);
    out += detail::join(cells);
    out += "\n";
  }
  return out;
}

inline nlohmann::json to_json(const std::vector<AnalysisRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  auto raw_bf = [](const normal::BayesFactorValue& v) {
    return v.exists ? nlohmann::json(v.log_bf) : nlohmann::json();
  };
  for (const auto& r : rows) {
    nlohmann::json j;
    j["id"] = r.id;
    j["c"] = r.c;
    j["d"] = r.d;
    j["Q"] = r.q;
    j["log_minBF_o"] = r.min_bf_o.log_bf;
    j["log_minBF_r"] = r.min_bf_r.log_bf;
    j["p_tilde_S"] = r.p_tilde_s;
    j["log_BF_S"] = raw_bf(r.bf_s);
    j["log_BF_R"] = raw_bf(r.bf_r);
    if (r.bf_s_exact) j["log_BF_S_exact"] = raw_bf(*r.bf_s_exact);
    if (r.bf_r_exact) j["log_BF_R_exact"] = raw_bf(*r.bf_r_exact);
    if (r.bf_sa_at_g) j["log_BF_SA_at_gamma"] = raw_bf(*r.bf_sa_at_g);
    nlohmann::json disp;
    const auto cells = analysis_row_cells(r);
    const char* names[] = {"id", "c", "d", "Q", "minBF_o", "minBF_r", "p_tilde_S",
                           "BF_S", "BF_S_exact", "BF_R", "BF_R_exact",
                           "BF_SA_at_gamma", "note"};
    for (std::size_t i = 0; i < cells.size(); ++i) disp[names[i]] = cells[i];
    j["display"] = disp;
    arr.push_back(std::move(j));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Curve emission
// ---------------------------------------------------------------------------

enum class CurveKind { bf_vs_g, success_region, power, t1e };

struct CurvePoint {
  std::string series;
  double x;
  double y;
};

struct CurveParams {
  std::vector<double> z_o_list{2.0, 3.0, 4.0};
  std::vector<double> c_list{0.5, 1.0, 2.0, 10.0};
  std::vector<double> gamma_list{1.0 / 3.0};
  double gamma = 1.0 / 3.0;
  int grid_points = 200;
  double g_max = 0.0;  // bf_vs_g; 0 means per-z default 2(z^2-1)
  double c_min = 0.1, c_max = 64.0;
};

namespace detail {

inline std::string series_tag(const std::string& base, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return base + "=" + buf;
}

}  // namespace detail

/// Long-format curve data for the standard figures: BF_{0:S} against g,
/// success-region boundaries against minBF_o, power and type I error against
/// the relative variance c.
inline std::vector<CurvePoint> compute_curves(CurveKind kind, const CurveParams& p) {
  std::vector<CurvePoint> out;
  const freq::Method methods[] = {freq::Method::sceptical_bf, freq::Method::two_trials,
                                  freq::Method::replication_bf, freq::Method::sceptical_p};
  switch (kind) {
    case CurveKind::bf_vs_g: {
      for (double z : p.z_o_list) {
        const double gmax = (p.g_max > 0.0) ? p.g_max
                                            : std::max(4.0, 2.0 * (z * z - 1.0));
        const auto tag = detail::series_tag("zo", z);
        for (int i = 0; i <= p.grid_points; ++i) {
          const double g = gmax * i / p.grid_points;
          out.push_back({tag, g, std::exp(normal::log_bf_0s(z, g))});
        }
      }
      break;
    }
    case CurveKind::success_region: {
      for (auto m : methods) {
        for (double c : p.c_list) {
          const std::string base =
              std::string(freq::method_name(m)) + ":" + detail::series_tag("c", c);
          for (int i = 0; i <= p.grid_points; ++i) {
            const double z = 1.01 + (4.5 - 1.01) * i / p.grid_points;
            const double min_bf = std::exp(normal::log_min_bf(z));
            const auto region =
                freq::success_region(m, z, c, normal::Level{p.gamma});
            const auto dmin = region.d_min();
            if (dmin) out.push_back({base + ":dmin", min_bf, *dmin});
            // an upper bound exists when the region is a bounded interval
            for (const auto& iv : region.intervals) {
              if (iv.first >= 0.0 && std::isfinite(iv.second))
                out.push_back({base + ":dmax", min_bf, iv.second});
            }
          }
        }
      }
      break;
    }
    case CurveKind::power: {
      for (auto m : methods) {
        for (double z : p.z_o_list) {
          for (bool predictive : {false, true}) {
            const std::string tag = std::string(freq::method_name(m)) + ":" +
                                    detail::series_tag("zo", z) + ":" +
                                    (predictive ? "predictive" : "conditional");
            for (int i = 0; i <= p.grid_points; ++i) {
              const double c =
                  p.c_min * std::pow(p.c_max / p.c_min,
                                     static_cast<double>(i) / p.grid_points);
              const auto hyp = predictive
                                   ? freq::SamplingHypothesis::predictive(z, c)
                                   : freq::SamplingHypothesis::conditional(z, c);
              out.push_back({tag, c,
                             freq::prob_success(m, z, c, normal::Level{p.gamma}, hyp)
                                 .probability});
            }
          }
        }
      }
      break;
    }
    case CurveKind::t1e: {
      for (auto m : methods) {
        for (double gamma : p.gamma_list) {
          const std::string tag = std::string(freq::method_name(m)) + ":" +
                                  detail::series_tag("gamma", gamma);
          for (int i = 0; i <= p.grid_points; ++i) {
            const double c = p.c_min * std::pow(p.c_max / p.c_min,
                                                static_cast<double>(i) / p.grid_points);
            out.push_back(
                {tag, c, freq::type1_error(m, normal::Level{gamma}, c).probability});
          }
        }
      }
      break;
    }
  }
  return out;
}

inline std::string curves_to_csv(const std::vector<CurvePoint>& pts) {
  std::string out = "series,x,y\n";
  for (const auto& p : pts) {
    out += p.series;
    out += ",";
    out += fmt::format_full(p.x);
    out += ",";
    out += fmt::format_full(p.y);
    out += "\n";
  }
  return out;
}

inline nlohmann::json curves_to_json(const std::vector<CurvePoint>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts)
    arr.push_back({{"series", p.series}, {"x", p.x}, {"y", p.y}});
  return arr;
}

/// Writes curve data to a file in csv or json; bit-reproducible for fixed
/// params.
inline void emit_curves(CurveKind kind, const CurveParams& params,
                        const std::string& sink, const std::string& format) {
  const auto pts = compute_curves(kind, params);
  std::ofstream out(sink);
  if (!out) throw std::runtime_error("cannot write '" + sink + "'");
  if (format == "json")
    out << curves_to_json(pts).dump(1) << "\n";
  else
    out << curves_to_csv(pts);
  if (!out) throw std::runtime_error("write failure on '" + sink + "'");
}

}  // namespace repbayes::io

#endif  // REPBAYES_IO_HPP
