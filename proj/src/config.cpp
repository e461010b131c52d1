#include "ghcm/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <fmt/core.h>

#include "ghcm/error.hpp"

namespace ghcm {

namespace {

std::string pair_key(const std::string& prefix, int i, int j) {
  return fmt::format("{}_{}_{}", prefix, i, j);
}

const ConfigTree& section(const ConfigTree& tree, const std::string& name) {
  const auto child = tree.get_child_optional(name);
  if (!child) throw ConfigError("config: missing [" + name + "] section");
  return *child;
}

std::string required(const ConfigTree& sec, const std::string& where, const std::string& key) {
  const auto value = sec.get_optional<std::string>(key);
  if (!value) throw ConfigError("config: missing key '" + key + "' in [" + where + "]");
  return boost::trim_copy(*value);
}

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_real(values[i]);
  }
  return out;
}

// "v" (constant) or "b0 b1 ... bm : c.. ; c.. ; ..." (breakpoints, then per-piece coefficients).
PiecewisePolynomial parse_piecewise(const std::string& text, const std::string& key, double r) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    return PiecewisePolynomial::constant(parse_real(text, key), r);
  }
  PiecewisePolynomial f;
  f.breakpoints = parse_reals(text.substr(0, colon), key);
  std::vector<std::string> pieces;
  const std::string rest = text.substr(colon + 1);
  boost::split(pieces, rest, boost::is_any_of(";"));
  for (const auto& piece : pieces) f.coefficients.push_back(parse_reals(piece, key));
  return f;
}

std::string format_piecewise(const PiecewisePolynomial& f) {
  if (f.piece_count() == 1 && f.coefficients[0].size() == 1) {
    return format_real(f.coefficients[0][0]);
  }
  std::string out = join_reals(f.breakpoints) + " :";
  for (std::size_t p = 0; p < f.piece_count(); ++p) {
    out += (p ? " ; " : " ") + join_reals(f.coefficients[p]);
  }
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text, const std::string& key) {
  const auto values = parse_reals(text, key);
  if (values.size() != 1) {
    throw ConfigError("config: key '" + key + "' expects one number, got '" + text + "'");
  }
  return values.front();
}

std::vector<double> parse_reals(const std::string& text, const std::string& key) {
  std::vector<std::string> tokens;
  const std::string trimmed = boost::trim_copy(text);
  if (trimmed.empty()) return {};
  boost::split(tokens, trimmed, boost::is_any_of(" \t,"), boost::token_compress_on);
  std::vector<double> out;
  for (const auto& tok : tokens) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ConfigError("config: key '" + key + "' has non-numeric value '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

ConfigTree read_config_tree(std::istream& in) {
  ConfigTree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return tree;
}

ConfigTree read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return read_config_tree(in);
}

std::string write_config_tree(const ConfigTree& tree) {
  std::ostringstream out;
  boost::property_tree::ini_parser::write_ini(out, tree);
  return out.str();
}

DistributionFamily family_from_tree(const ConfigTree& fam, int k, double r) {
  const std::string kind = required(fam, "family", "kind");
  std::optional<double> eta;
  if (auto e = fam.get_optional<std::string>("eta_bound")) eta = parse_real(*e, "eta_bound");

  auto per_pair_functions = [&](const std::string& prefix) {
    std::vector<PiecewisePolynomial> fs;
    const auto within = fam.get_optional<std::string>("within");
    const auto across = fam.get_optional<std::string>("across");
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        const std::string key = pair_key(prefix, i, j);
        if (auto v = fam.get_optional<std::string>(key)) {
          fs.push_back(parse_piecewise(boost::trim_copy(*v), key, r));
        } else if (within && across) {
          fs.push_back(parse_piecewise(boost::trim_copy(i == j ? *within : *across),
                                       i == j ? "within" : "across", r));
        } else {
          throw ConfigError("config: missing key '" + key + "' in [family]");
        }
      }
    }
    return fs;
  };

  if (kind == "bernoulli") {
    return DistributionFamily(k, r, BernoulliGate{per_pair_functions("f")}, eta);
  }
  if (kind == "gaussian") {
    GaussianShift g;
    g.sigma = parse_real(required(fam, "family", "sigma"), "sigma");
    g.mu = per_pair_functions("mu");
    return DistributionFamily(k, r, g, eta);
  }
  if (kind == "table") {
    TablePMF t;
    t.alphabet = parse_reals(required(fam, "family", "alphabet"), "alphabet");
    if (auto b = fam.get_optional<std::string>("bins")) {
      t.bins = parse_reals(*b, "bins");
    } else {
      t.bins = {0.0, r};
    }
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        const std::string key = pair_key("pmf", i, j);
        std::vector<std::string> rows;
        const std::string text = required(fam, "family", key);
        boost::split(rows, text, boost::is_any_of(";"));
        std::vector<std::vector<double>> table;
        for (const auto& row : rows) table.push_back(parse_reals(row, key));
        t.pmf.push_back(std::move(table));
      }
    }
    return DistributionFamily(k, r, t, eta);
  }
  throw ConfigError("config: unknown family kind '" + kind +
                    "' (expected bernoulli, gaussian or table)");
}

ModelConfig model_config_from_tree(const ConfigTree& tree) {
  const auto& model = section(tree, "model");
  const double lambda = parse_real(required(model, "model", "lambda"), "lambda");
  const double n = parse_real(required(model, "model", "n"), "n");
  const double r = parse_real(required(model, "model", "r"), "r");
  const double d_real = parse_real(required(model, "model", "d"), "d");
  const auto d = static_cast<int>(d_real);
  if (static_cast<double>(d) != d_real || d < 1) throw ConfigError("config: d must be a positive integer");
  const auto pi = parse_reals(required(model, "model", "pi"), "pi");
  if (pi.size() < 2) throw ConfigError("config: pi needs at least two communities");
  ModelConfig config{lambda, n, r, d, pi,
                     family_from_tree(section(tree, "family"), static_cast<int>(pi.size()), r)};
  config.validate();
  return config;
}

void model_config_to_tree(const ModelConfig& config, ConfigTree& tree) {
  tree.put("model.lambda", format_real(config.lambda));
  tree.put("model.n", format_real(config.n));
  tree.put("model.r", format_real(config.r));
  tree.put("model.d", config.d);
  tree.put("model.pi", join_reals(config.pi));
  const auto& fam = config.family;
  const int k = fam.k();
  tree.put("family.kind", to_string(fam.kind()));
  if (fam.eta_bound()) tree.put("family.eta_bound", format_real(*fam.eta_bound()));
  if (const auto* g = std::get_if<BernoulliGate>(&fam.payload())) {
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        tree.put("family." + pair_key("f", i, j), format_piecewise(g->f[fam.pair_index(i, j)]));
      }
    }
  } else if (const auto* gs = std::get_if<GaussianShift>(&fam.payload())) {
    tree.put("family.sigma", format_real(gs->sigma));
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        tree.put("family." + pair_key("mu", i, j), format_piecewise(gs->mu[fam.pair_index(i, j)]));
      }
    }
  } else {
    const auto& t = std::get<TablePMF>(fam.payload());
    tree.put("family.alphabet", join_reals(t.alphabet));
    tree.put("family.bins", join_reals(t.bins));
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        std::string text;
        const auto& table = t.pmf[fam.pair_index(i, j)];
        for (std::size_t b = 0; b < table.size(); ++b) text += (b ? " ; " : "") + join_reals(table[b]);
        tree.put("family." + pair_key("pmf", i, j), text);
      }
    }
  }
}

}  // namespace ghcm
