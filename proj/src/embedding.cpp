#include "spanning/embedding.hpp"

#include "spanning/random.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace spanning {
namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

struct PlainAccess {
    static double load(double& x) { return x; }
    static void store(double& x, double v) { x = v; }
};

// Lock-free shared weights: individual loads/stores are atomic, read-modify-write
// sequences are not, so concurrent updates may overwrite each other.
struct RelaxedAccess {
    static double load(double& x) { return std::atomic_ref<double>(x).load(std::memory_order_relaxed); }
    static void store(double& x, double v) { std::atomic_ref<double>(x).store(v, std::memory_order_relaxed); }
};

// targets[0] is the positive context, the rest are negatives. `scratch` holds
// 2 * dim doubles.
template <class Access>
double sgns_update(double* center, std::span<double* const> targets, std::size_t dim, double lr, double* scratch) {
    double* v = scratch;
    double* grad = scratch + dim;
    for (std::size_t d = 0; d < dim; ++d) {
        v[d] = Access::load(center[d]);
        grad[d] = 0.0;
    }
    double loss = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        double* u = targets[t];
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) s += v[d] * Access::load(u[d]);
        const double label = t == 0 ? 1.0 : 0.0;
        loss -= t == 0 ? log_sigmoid(s) : log_sigmoid(-s);
        const double g = lr * (label - sigmoid(s));
        for (std::size_t d = 0; d < dim; ++d) {
            const double ud = Access::load(u[d]);
            grad[d] += g * ud;
            Access::store(u[d], ud + g * v[d]);
        }
    }
    for (std::size_t d = 0; d < dim; ++d) Access::store(center[d], Access::load(center[d]) + grad[d]);
    return loss;
}

class NoiseSampler {
public:
    NoiseSampler(std::span<const std::uint64_t> counts, double exponent) : cumulative_(counts.size()) {
        double total = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            total += std::pow(static_cast<double>(std::max<std::uint64_t>(counts[i], 1)), exponent);
            cumulative_[i] = total;
        }
    }

    std::uint32_t draw(Rng& rng) const {
        const double x = rng.uniform() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
        if (it == cumulative_.end()) --it;
        return static_cast<std::uint32_t>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

struct Weights {
    std::size_t dim;
    std::vector<double> input;
    std::vector<double> output;

    double* in(std::uint32_t i) { return input.data() + std::size_t{i} * dim; }
    double* out(std::uint32_t i) { return output.data() + std::size_t{i} * dim; }
};

struct EpochSlice {
    std::span<const std::uint32_t> order;
    std::size_t first_step;  // global step index of order[0]
};

template <class Access>
double run_slice(const TrainingData& data, const TrainingConfig& cfg, const NoiseSampler& noise, Weights& w,
                 EpochSlice slice, std::size_t total_steps, Rng& rng) {
    const std::size_t dim = w.dim;
    const auto k = static_cast<std::size_t>(cfg.negatives_per_positive);
    std::vector<double*> targets(1 + k);
    std::vector<double> scratch(2 * dim);
    double loss = 0.0;
    for (std::size_t i = 0; i < slice.order.size(); ++i) {
        const TrainingPair& pair = data.pairs[slice.order[i]];
        const double progress = static_cast<double>(slice.first_step + i) / static_cast<double>(total_steps);
        const double lr = cfg.initial_learning_rate - (cfg.initial_learning_rate - cfg.final_learning_rate) * progress;
        targets[0] = w.out(pair.context);
        for (std::size_t n = 0; n < k; ++n) {
            std::uint32_t neg;
            do {
                neg = noise.draw(rng);
            } while (neg == pair.context);
            targets[1 + n] = w.out(neg);
        }
        loss += sgns_update<Access>(w.in(pair.center), targets, dim, lr, scratch.data());
    }
    return loss;
}

void append_double(std::string& out, double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

} // namespace

TrainingData build_training_pairs(const Corpus& corpus) {
    std::map<PacsCode, std::uint64_t> counts;
    for (const Paper& p : corpus.papers())
        for (const PacsCode& c : p.pacs_codes) ++counts[c];

    TrainingData data;
    std::unordered_map<std::string, std::uint32_t> index;
    for (const auto& [code, count] : counts) {
        index.emplace(code.canonical(), static_cast<std::uint32_t>(data.vocabulary.codes.size()));
        data.vocabulary.codes.push_back(code);
        data.vocabulary.counts.push_back(count);
    }

    std::vector<std::uint32_t> ids;
    for (const Paper& p : corpus.papers()) {
        ids.clear();
        for (const PacsCode& c : p.pacs_codes) ids.push_back(index.at(c.canonical()));
        for (std::uint32_t a : ids)
            for (std::uint32_t b : ids)
                if (a != b) data.pairs.push_back({a, b});
    }
    return data;
}

void TrainingConfig::validate() const {
    if (dim < 2) throw EmbeddingError("embedding dim must be at least 2");
    if (negatives_per_positive < 1) throw EmbeddingError("negatives_per_positive must be at least 1");
    if (epochs < 1) throw EmbeddingError("epochs must be at least 1");
    if (!(initial_learning_rate > 0.0)) throw EmbeddingError("initial learning rate must be positive");
    if (!(final_learning_rate > 0.0) || final_learning_rate > initial_learning_rate)
        throw EmbeddingError("final learning rate must be positive and not exceed the initial rate");
    if (!(noise_exponent >= 0.0)) throw EmbeddingError("noise exponent must be nonnegative");
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<PacsCode> codes, std::vector<double> values)
    : dim_(dim), codes_(std::move(codes)), values_(std::move(values)) {
    if (dim_ == 0) throw EmbeddingError("embedding dim must be positive");
    if (values_.size() != codes_.size() * dim_) throw EmbeddingError("embedding values do not match dim x vocab");
    index_.reserve(codes_.size());
    for (std::size_t i = 0; i < codes_.size(); ++i)
        if (!index_.emplace(codes_[i].canonical(), i).second)
            throw EmbeddingError("duplicate code '" + codes_[i].canonical() + "' in embedding");
}

std::span<const double> EmbeddingMatrix::vector(const PacsCode& code) const {
    auto it = index_.find(code.canonical());
    if (it == index_.end()) throw EmbeddingError("code '" + code.canonical() + "' is not in the embedding vocabulary");
    return row(it->second);
}

void EmbeddingMatrix::write(std::ostream& out) const {
    std::string line;
    out << "dim=" << dim_ << " vocab=" << codes_.size() << '\n';
    for (std::size_t i = 0; i < codes_.size(); ++i) {
        line = codes_[i].canonical();
        for (double x : row(i)) {
            line.push_back(' ');
            append_double(line, x);
        }
        line.push_back('\n');
        out << line;
    }
}

EmbeddingMatrix EmbeddingMatrix::read(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw EmbeddingError("embedding file is empty");
    std::size_t dim = 0, vocab = 0;
    {
        std::istringstream h(header);
        std::string a, b;
        h >> a >> b;
        auto field = [&](const std::string& tok, std::string_view key) -> std::size_t {
            if (tok.rfind(key, 0) != 0) throw EmbeddingError("malformed embedding header: " + header);
            std::size_t v = 0;
            auto [p, ec] = std::from_chars(tok.data() + key.size(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw EmbeddingError("malformed embedding header: " + header);
            return v;
        };
        dim = field(a, "dim=");
        vocab = field(b, "vocab=");
    }
    std::vector<PacsCode> codes;
    std::vector<double> values;
    codes.reserve(vocab);
    values.reserve(vocab * dim);
    std::string line;
    for (std::size_t i = 0; i < vocab; ++i) {
        if (!std::getline(in, line)) throw EmbeddingError("embedding file truncated at row " + std::to_string(i));
        std::istringstream row(line);
        std::string code;
        row >> code;
        codes.push_back(PacsCode::parse(code));
        for (std::size_t d = 0; d < dim; ++d) {
            std::string tok;
            if (!(row >> tok)) throw EmbeddingError("embedding row for '" + code + "' has too few values");
            double x = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw EmbeddingError("bad embedding value '" + tok + "' for '" + code + "'");
            values.push_back(x);
        }
        std::string extra;
        if (row >> extra) throw EmbeddingError("embedding row for '" + code + "' has too many values");
    }
    return EmbeddingMatrix(dim, std::move(codes), std::move(values));
}

EmbeddingMatrix EmbeddingMatrix::scaled(double factor) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= factor;
    return EmbeddingMatrix(dim_, codes_, std::move(v));
}

TrainingResult train_embeddings(const TrainingData& data, const TrainingConfig& cfg) {
    cfg.validate();
    if (data.pairs.empty()) throw EmbeddingError("no training pairs: every paper has a single code");
    if (data.vocabulary.size() < 2) throw EmbeddingError("vocabulary of size 1 leaves nothing to sample as negatives");

    const auto dim = static_cast<std::size_t>(cfg.dim);
    const std::size_t vocab = data.vocabulary.size();
    Rng rng(cfg.seed);

    Weights w{dim, std::vector<double>(vocab * dim), std::vector<double>(vocab * dim, 0.0)};
    const double half_width = 0.5 / static_cast<double>(dim);
    for (double& x : w.input) x = rng.uniform(-half_width, half_width);

    const NoiseSampler noise(data.vocabulary.counts, cfg.noise_exponent);
    const std::size_t n_pairs = data.pairs.size();
    const std::size_t total_steps = n_pairs * static_cast<std::size_t>(cfg.epochs);
    std::vector<std::uint32_t> order(n_pairs);
    std::iota(order.begin(), order.end(), 0u);

    unsigned workers = 1;
    if (!cfg.deterministic) {
        workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
        workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_pairs));
    }

    std::vector<double> epoch_loss;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(std::span(order));
        const std::size_t epoch_start = static_cast<std::size_t>(epoch) * n_pairs;
        double loss = 0.0;
        if (workers == 1) {
            loss = run_slice<PlainAccess>(data, cfg, noise, w, {order, epoch_start}, total_steps, rng);
        } else {
            std::vector<double> partial(workers, 0.0);
            std::vector<std::uint64_t> seeds(workers);
            for (auto& s : seeds) s = rng.next();
            {
                std::vector<std::jthread> pool;
                const std::size_t chunk = (n_pairs + workers - 1) / workers;
                for (unsigned t = 0; t < workers; ++t) {
                    const std::size_t lo = std::min(n_pairs, t * chunk);
                    const std::size_t hi = std::min(n_pairs, lo + chunk);
                    pool.emplace_back([&, t, lo, hi] {
                        Rng local(seeds[t]);
                        EpochSlice slice{std::span(order).subspan(lo, hi - lo), epoch_start + lo};
                        partial[t] = run_slice<RelaxedAccess>(data, cfg, noise, w, slice, total_steps, local);
                    });
                }
            }
            for (double p : partial) loss += p;
        }
        epoch_loss.push_back(loss / static_cast<double>(n_pairs));
    }

    return {EmbeddingMatrix(dim, data.vocabulary.codes, std::move(w.input)), std::move(epoch_loss)};
}

SgnsGradient sgns_loss_and_gradient(std::span<const double> center, std::span<const double> context,
                                    std::span<const std::vector<double>> negatives) {
    const std::size_t dim = center.size();
    if (context.size() != dim) throw EmbeddingError("context vector length differs from center");
    SgnsGradient g;
    g.center.assign(dim, 0.0);
    g.context.assign(dim, 0.0);

    auto dot = [&](std::span<const double> u) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) s += center[d] * u[d];
        return s;
    };

    const double s_pos = dot(context);
    g.loss = -log_sigmoid(s_pos);
    const double c_pos = sigmoid(s_pos) - 1.0;  // d loss / d s_pos
    for (std::size_t d = 0; d < dim; ++d) {
        g.center[d] += c_pos * context[d];
        g.context[d] = c_pos * center[d];
    }
    for (const auto& u : negatives) {
        if (u.size() != dim) throw EmbeddingError("negative vector length differs from center");
        const double s = dot(u);
        g.loss -= log_sigmoid(-s);
        const double c = sigmoid(s);  // d loss / d s_neg
        auto& gn = g.negatives.emplace_back(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            g.center[d] += c * u[d];
            gn[d] = c * center[d];
        }
    }
    return g;
}

double sgns_step(std::span<double> center, std::span<double> context, std::span<std::vector<double>> negatives,
                 double learning_rate) {
    const std::size_t dim = center.size();
    std::vector<double*> targets{context.data()};
    for (auto& n : negatives) targets.push_back(n.data());
    std::vector<double> scratch(2 * dim);
    return sgns_update<PlainAccess>(center.data(), targets, dim, learning_rate, scratch.data());
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw EmbeddingError("cosine of vectors with different lengths");
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) throw EmbeddingError("cosine of a zero-norm vector is undefined");
    return uv / std::sqrt(uu * vv);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    return std::clamp(1.0 - cosine_similarity(u, v), 0.0, 2.0);
}

} // namespace spanning
