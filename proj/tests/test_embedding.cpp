#include "fixtures.hpp"
#include "oracles.hpp"

#include "spanning/embedding.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace spanning;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-scale, scale);
    return v;
}

TrainingConfig small_config() {
    TrainingConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 3;
    cfg.seed = 5;
    return cfg;
}

double mean_similarity(const EmbeddingMatrix& m, bool within) {
    double sum = 0;
    int n = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            if ((a == b) != within) continue;
            for (int i = 0; i < 10; ++i)
                for (int j = 0; j < 10; ++j) {
                    if (a == b && i == j) continue;
                    sum += cosine_similarity(m.vector(PacsCode::parse(fixtures::block_code(a, i))),
                                             m.vector(PacsCode::parse(fixtures::block_code(b, j))));
                    ++n;
                }
        }
    return sum / n;
}

} // namespace

TEST_CASE("training pairs enumerate ordered code pairs per paper") {
    auto c = fixtures::corpus({fixtures::paper("A", 2000, {"11.11.Aa", "22.22.Bb"}), fixtures::paper("B", 2000, {"33.33.Cc"}),
                               fixtures::paper("C", 2000, {"11.11.Aa", "11.11.Ab", "11.11.Ac", "11.11.Ad", "11.11.Ae"})});
    const auto data = build_training_pairs(c);
    CHECK(data.vocabulary.size() == 7);

    // Brute-force enumeration of ordered pairs within each paper.
    std::multiset<std::pair<std::string, std::string>> want;
    for (const auto& p : c.papers())
        for (const auto& a : p.pacs_codes)
            for (const auto& b : p.pacs_codes)
                if (!(a == b)) want.insert({a.canonical(), b.canonical()});
    std::multiset<std::pair<std::string, std::string>> got;
    for (const auto& pr : data.pairs)
        got.insert({data.vocabulary.codes[pr.center].canonical(), data.vocabulary.codes[pr.context].canonical()});
    CHECK(got == want);
    CHECK(data.pairs.size() == 2 + 0 + 20);
}

TEST_CASE("cosine distance examples") {
    const std::vector<double> e1{1, 0}, e2{0, 1}, d{1, 1};
    CHECK(cosine_distance(e1, e1) == 0.0);
    CHECK(cosine_distance(e1, e2) == 1.0);
    const double want = static_cast<double>(1 - 1 / boost::multiprecision::sqrt(oracle::HighPrecision(2)));
    CHECK(oracle::relative_error(cosine_distance(d, e1), want) <= 1e-15);
    CHECK_THROWS_AS(cosine_distance(e1, std::vector<double>{0, 0}), EmbeddingError);
    CHECK_THROWS_AS(cosine_distance(e1, std::vector<double>{1, 0, 0}), EmbeddingError);
}

TEST_CASE("property: cosine distance is symmetric, scale invariant and bounded") {
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(20);
        auto u = random_vector(rng, n), v = random_vector(rng, n);
        const double d = cosine_distance(u, v);
        CHECK(d >= 0.0);
        CHECK(d <= 2.0);
        CHECK(d == cosine_distance(v, u));
        const double k = rng.uniform(0.1, 10.0);
        for (auto& x : u) x *= k;
        CHECK(std::fabs(cosine_distance(u, v) - d) <= 1e-12);
        CHECK(std::fabs(d - oracle::hp_cosine_distance(u, v)) <= 1e-12);
    }
}

TEST_CASE("sgns gradient matches central finite differences") {
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const std::size_t dim = 10;
        auto center = random_vector(rng, dim, 0.5), context = random_vector(rng, dim, 0.5);
        std::vector<std::vector<double>> negs;
        for (int k = 0; k < 5; ++k) negs.push_back(random_vector(rng, dim, 0.5));
        const auto g = sgns_loss_and_gradient(center, context, negs);

        const double h = 1e-5;
        auto check = [&](std::vector<double>& x, const std::vector<double>& analytic) {
            double num = 0, den = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double keep = x[i];
                x[i] = keep + h;
                const double up = sgns_loss_and_gradient(center, context, negs).loss;
                x[i] = keep - h;
                const double down = sgns_loss_and_gradient(center, context, negs).loss;
                x[i] = keep;
                const double fd = (up - down) / (2 * h);
                num += (fd - analytic[i]) * (fd - analytic[i]);
                den += analytic[i] * analytic[i];
            }
            CHECK(std::sqrt(num / den) <= 1e-4);
        };
        check(center, g.center);
        check(context, g.context);
        for (std::size_t k = 0; k < negs.size(); ++k) check(negs[k], g.negatives[k]);
    }
}

TEST_CASE("sgns_step moves every vector by -lr times its gradient") {
    Rng rng(2);
    auto center = random_vector(rng, 6), context = random_vector(rng, 6);
    std::vector<std::vector<double>> negs{random_vector(rng, 6), random_vector(rng, 6)};
    const auto g = sgns_loss_and_gradient(center, context, negs);
    auto c2 = center, o2 = context;
    auto n2 = negs;
    const double lr = 0.05;
    CHECK(sgns_step(c2, o2, n2, lr) == g.loss);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(c2[i] == doctest::Approx(center[i] - lr * g.center[i]).epsilon(1e-14));
        CHECK(o2[i] == doctest::Approx(context[i] - lr * g.context[i]).epsilon(1e-14));
        CHECK(n2[1][i] == doctest::Approx(negs[1][i] - lr * g.negatives[1][i]).epsilon(1e-14));
    }
}

TEST_CASE("training config preconditions") {
    TrainingConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), EmbeddingError);
    cfg = {};
    cfg.dim = 0;
    CHECK_THROWS_AS(cfg.validate(), EmbeddingError);

    auto c = fixtures::corpus({fixtures::paper("A", 2000, {"11.11.Aa", "22.22.Bb"})});
    auto data = build_training_pairs(c);
    TrainingConfig zero_epochs;
    zero_epochs.epochs = 0;
    CHECK_THROWS_AS(train_embeddings(data, zero_epochs), EmbeddingError);

    auto single = fixtures::corpus({fixtures::paper("A", 2000, {"11.11.Aa"})});
    CHECK_THROWS_AS(train_embeddings(build_training_pairs(single), TrainingConfig{}), EmbeddingError);

    TrainingData one_word;
    one_word.vocabulary.codes = {PacsCode::parse("11.11.Aa")};
    one_word.vocabulary.counts = {2};
    one_word.pairs = {{0, 0}};
    CHECK_THROWS_AS(train_embeddings(one_word, TrainingConfig{}), EmbeddingError);
}

TEST_CASE("training output shape and determinism") {
    const auto c = fixtures::two_block_corpus(9, 200);
    const auto data = build_training_pairs(c);
    const auto a = train_embeddings(data, small_config());
    const auto b = train_embeddings(data, small_config());
    CHECK(a.matrix.size() == 20);
    CHECK(a.matrix.dim() == 8);
    CHECK(a.matrix == b.matrix);
    CHECK(a.epoch_loss == b.epoch_loss);
    CHECK(a.epoch_loss.size() == 3);

    auto other = small_config();
    other.seed = 6;
    CHECK_FALSE(train_embeddings(data, other).matrix == a.matrix);
    CHECK_THROWS_AS(a.matrix.vector(PacsCode::parse("99.99.Zz")), EmbeddingError);
}

TEST_CASE("nondeterministic training still produces a usable matrix") {
    const auto data = build_training_pairs(fixtures::two_block_corpus(9, 400));
    auto cfg = small_config();
    cfg.deterministic = false;
    cfg.threads = 4;
    const auto r = train_embeddings(data, cfg);
    CHECK(r.matrix.size() == 20);
    for (std::size_t i = 0; i < r.matrix.size(); ++i)
        for (double x : r.matrix.row(i)) CHECK(std::isfinite(x));
}

TEST_CASE("loss falls on a repeated two-word corpus") {
    std::vector<Paper> papers;
    for (int i = 0; i < 50; ++i) papers.push_back(fixtures::paper("P" + std::to_string(i), 2000, {"11.11.Aa", "22.22.Bb"}));
    const auto r = train_embeddings(build_training_pairs(fixtures::corpus(papers)), TrainingConfig{});
    REQUIRE(r.epoch_loss.size() == 5);
    CHECK(r.epoch_loss.back() < r.epoch_loss.front());
}

TEST_CASE("two-block corpus separates the blocks") {
    const auto r = train_embeddings(build_training_pairs(fixtures::two_block_corpus(2024)), TrainingConfig{});
    const double within = mean_similarity(r.matrix, true);
    const double across = mean_similarity(r.matrix, false);
    MESSAGE("within=" << within << " across=" << across);
    CHECK(within - across >= 0.3);
    CHECK(r.epoch_loss.back() < r.epoch_loss.front());
}

TEST_CASE("embedding file round-trips exactly") {
    const auto r = train_embeddings(build_training_pairs(fixtures::two_block_corpus(1, 100)), small_config());
    std::stringstream s;
    r.matrix.write(s);
    CHECK(EmbeddingMatrix::read(s) == r.matrix);
    const auto twice = r.matrix.scaled(2.0);
    CHECK(twice.row(3)[2] == 2.0 * r.matrix.row(3)[2]);
}
