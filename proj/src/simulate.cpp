#include "oamfso/simulate.hpp"

#include "oamfso/decode.hpp"
#include "oamfso/parallel.hpp"
#include "oamfso/seed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>

namespace oamfso {

double normalize_ensemble(std::vector<Eigen::MatrixXcd>& realizations) {
  if (realizations.empty()) throw std::invalid_argument("normalize_ensemble: ensemble is empty");
  double mean = 0.0;
  for (const auto& h : realizations) mean += h.squaredNorm() / static_cast<double>(h.rows());
  mean /= static_cast<double>(realizations.size());
  if (!(mean > 0.0)) throw std::invalid_argument("normalize_ensemble: ensemble has zero power");
  const double c = 1.0 / std::sqrt(mean);
  for (auto& h : realizations) h *= c;
  return c;
}

double normalize_ensemble(ChannelEnsemble& ensemble) { return normalize_ensemble(ensemble.realizations); }

namespace {

template <class Rng>
void add_noise(std::span<cplx> symbols, double n0, Rng& rng) {
  if (n0 == 0.0) return;
  std::normal_distribution<double> normal(0.0, std::sqrt(n0 / 2.0));
  for (auto& s : symbols) {
    const double re = normal(rng);
    s += cplx(re, normal(rng));
  }
}

struct LinkState {
  Eigen::MatrixXcd h;
  Eigen::MatrixXd generator;
  std::optional<SphereDecoder> decoder;
};

struct BatchResult {
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  std::uint64_t squared_errors = 0;  // sum over codewords of (bit errors)^2
  std::uint64_t codewords = 0;
  std::uint64_t nodes = 0;
  std::uint64_t fallbacks = 0;
  std::vector<std::uint32_t> node_log;
};

BatchResult run_batch(const SimConfig& cfg, const std::vector<LinkState>& links, double n0,
                      std::size_t point, std::uint64_t batch) {
  std::mt19937_64 rng(batch_seed(cfg.master_seed, point, batch));
  const CodeSpec& code = cfg.code;
  const int nbits = code.bits_per_codeword();
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(nbits));
  BatchResult out;
  for (int i = 0; i < cfg.batch_codewords; ++i) {
    const std::uint64_t c = batch * static_cast<std::uint64_t>(cfg.batch_codewords) + i;
    const LinkState& link = links[c % links.size()];

    std::uint64_t word = rng();
    for (int b = 0; b < nbits; ++b) {
      if (b > 0 && b % 64 == 0) word = rng();
      bits[b] = (word >> (b % 64)) & 1u;
    }
    const auto symbols = qpsk::modulate(bits);
    Eigen::MatrixXcd y = link.h * encode(code, symbols);
    add_noise(std::span<cplx>(y.data(), static_cast<std::size_t>(y.size())), n0, rng);
    const Eigen::VectorXd obs = stack_observation(y);

    DecodeResult r;
    if (link.decoder) {
      r = link.decoder->decode(obs);
    } else {
      r = ml_exhaustive_real(link.generator, obs);
      ++out.fallbacks;
    }
    const auto decided = qpsk::demap(r.symbols);
    std::uint64_t e = 0;
    for (int b = 0; b < nbits; ++b) e += decided[b] != bits[b];
    out.errors += e;
    out.squared_errors += e * e;
    out.bits += static_cast<std::uint64_t>(nbits);
    out.nodes += r.nodes;
    if (cfg.record_nodes) out.node_log.push_back(static_cast<std::uint32_t>(r.nodes));
    ++out.codewords;
  }
  return out;
}

std::vector<LinkState> build_links(const SimConfig& cfg) {
  std::vector<LinkState> links;
  const auto add = [&](const Eigen::MatrixXcd& h) {
    LinkState s{h, equivalent_channel(h, cfg.code), std::nullopt};
    try {
      s.decoder.emplace(s.generator);
    } catch (const std::invalid_argument&) {
      // rank deficient: exhaustive fallback
    }
    links.push_back(std::move(s));
  };
  if (cfg.channels.empty()) {
    add(Eigen::MatrixXcd::Identity(cfg.code.modes, cfg.code.modes));
  } else {
    for (const auto& h : cfg.channels) add(h);
  }
  return links;
}

}  // namespace

void awgn(std::span<cplx> symbols, double n0, std::uint64_t seed) {
  if (n0 < 0.0) throw std::invalid_argument("awgn: n0 must be >= 0");
  std::mt19937_64 rng(seed);
  add_noise(symbols, n0, rng);
}

void SimConfig::validate(bool require_grid) const {
  if (require_grid && snr_db.empty()) throw std::invalid_argument("SimConfig: SNR grid is empty");
  if (min_bit_errors < 1) throw std::invalid_argument("SimConfig: min_bit_errors must be >= 1");
  if (batch_codewords < 1) throw std::invalid_argument("SimConfig: batch_codewords must be >= 1");
  for (const auto& h : channels)
    if (h.rows() != code.modes || h.cols() != code.modes)
      throw std::invalid_argument("SimConfig: channel size does not match the code's M");
}

std::uint64_t batch_seed(std::uint64_t master_seed, std::size_t point, std::uint64_t batch) {
  return derive_seed(master_seed, {kBerStream, static_cast<std::uint64_t>(point), batch});
}

BerPoint run_ber_point(const SimConfig& cfg, double snr_db, std::size_t point_index) {
  cfg.validate(false);
  const auto start = std::chrono::steady_clock::now();
  const auto links = build_links(cfg);
  const double n0 = std::pow(10.0, -snr_db / 10.0);
  const int workers = std::max(1, cfg.threads);

  BerPoint pt;
  pt.snr_db = snr_db;
  std::uint64_t nodes = 0, squared_errors = 0;
  std::uint64_t next_batch = 0;
  bool done = false;
  std::vector<BatchResult> wave(static_cast<std::size_t>(workers));
  while (!done) {
    parallel_for(wave.size(), workers, [&](std::size_t, std::size_t i) {
      wave[i] = run_batch(cfg, links, n0, point_index, next_batch + i);
    });
    // Commit in batch order; anything past the stopping batch is discarded.
    for (const auto& b : wave) {
      pt.bits += b.bits;
      pt.errors += b.errors;
      squared_errors += b.squared_errors;
      pt.codewords += b.codewords;
      pt.fallback_decodes += b.fallbacks;
      nodes += b.nodes;
      pt.node_log.insert(pt.node_log.end(), b.node_log.begin(), b.node_log.end());
      if (pt.errors >= cfg.min_bit_errors) {
        done = true;
        break;
      }
      if (pt.bits >= cfg.max_bits) {
        pt.capped = true;
        done = true;
        break;
      }
    }
    next_batch += wave.size();
  }
  pt.ber = pt.bits ? static_cast<double>(pt.errors) / static_cast<double>(pt.bits) : 0.0;
  if (pt.codewords > 1) {
    const double n = static_cast<double>(pt.codewords);
    const double mean = static_cast<double>(pt.errors) / n;
    const double var = std::max(0.0, (static_cast<double>(squared_errors) / n - mean * mean) * n / (n - 1.0));
    pt.ber_stderr = std::sqrt(var / n) / cfg.code.bits_per_codeword();
  }
  pt.mean_nodes = pt.codewords ? static_cast<double>(nodes) / static_cast<double>(pt.codewords) : 0.0;
  pt.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return pt;
}

std::vector<BerPoint> run_sweep(const SimConfig& cfg) {
  cfg.validate();
  std::vector<BerPoint> out;
  out.reserve(cfg.snr_db.size());
  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) out.push_back(run_ber_point(cfg, cfg.snr_db[i], i));
  return out;
}

void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points) {
  os << "snr_db,bits,errors,ber,codewords,capped\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.4f,%llu,%llu,%.6e,%llu,%d\n", p.snr_db,
                  static_cast<unsigned long long>(p.bits), static_cast<unsigned long long>(p.errors), p.ber,
                  static_cast<unsigned long long>(p.codewords), p.capped ? 1 : 0);
    os << buf;
  }
}

void write_node_csv(std::ostream& os, const std::vector<BerPoint>& points) {
  os << "snr_db,codeword,nodes\n";
  char buf[96];
  for (const auto& p : points)
    for (std::size_t c = 0; c < p.node_log.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.4f,%zu,%u\n", p.snr_db, c, p.node_log[c]);
      os << buf;
    }
}

std::vector<Eigen::MatrixXcd> prepare_channels(const ChannelEnsemble& bank, const ModeSet& modes, double* scale) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(bank.size());
  for (const auto& h : bank.realizations) out.push_back(submatrix(h, bank.charges, modes));
  const double c = normalize_ensemble(out);
  if (scale) *scale = c;
  return out;
}

}  // namespace oamfso
