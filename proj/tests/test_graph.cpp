#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "dffls/graph.hpp"
#include "helpers.hpp"

using namespace dffls;
using namespace dffls::test;

TEST_CASE("adjacency invariants enforced at construction") {
    Eigen::MatrixXd bad_sum(2, 2);
    bad_sum << 0.6, 0.6, 0.5, 0.5;
    CHECK_THROWS_AS(WeightedDigraph{bad_sum}, PreconditionViolated);

    Eigen::MatrixXd negative(2, 2);
    negative << 1.5, -0.5, 0.5, 0.5;
    CHECK_THROWS_AS(WeightedDigraph{negative}, PreconditionViolated);

    Eigen::MatrixXd zero_diag(2, 2);
    zero_diag << 0.0, 1.0, 0.5, 0.5;
    CHECK_THROWS_AS(WeightedDigraph{zero_diag}, PreconditionViolated);

    CHECK_NOTHROW(WeightedDigraph{path3()});
}

TEST_CASE("undirected connectivity") {
    Eigen::MatrixXd path(3, 3);
    path << 0.75, 0.25, 0.0, 0.25, 0.5, 0.25, 0.0, 0.25, 0.75;
    CHECK(is_connected_undirected(WeightedDigraph(path)));

    CHECK_FALSE(is_connected_undirected(WeightedDigraph(Eigen::MatrixXd::Identity(2, 2))));

    Eigen::MatrixXd star(4, 4);
    star << 0.25, 0.25, 0.25, 0.25,  //
        0.25, 0.75, 0.0, 0.0,        //
        0.25, 0.0, 0.75, 0.0,        //
        0.25, 0.0, 0.0, 0.75;
    CHECK(is_connected_undirected(WeightedDigraph(star)));

    // path3() is row-stochastic but not symmetric
    CHECK_THROWS_AS(is_connected_undirected(WeightedDigraph(path3())), AsymmetricAdjacency);
}

TEST_CASE("diameter on fixtures") {
    Eigen::MatrixXd path(3, 3);
    path << 0.75, 0.25, 0.0, 0.25, 0.5, 0.25, 0.0, 0.25, 0.75;
    CHECK(diameter(WeightedDigraph(path)) == 2);

    CHECK(diameter(WeightedDigraph(complete_uniform(4))) == 1);

    CHECK(diameter(WeightedDigraph(cycle_graph(6))) == 3);
}

TEST_CASE("diameter matches Floyd-Warshall on random connected graphs") {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution extra(0.3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 5);
        // symmetric path backbone plus random symmetric extra edges
        Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i + 1 < n; ++i) B(i, i + 1) = B(i + 1, i) = 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 2; j < n; ++j)
                if (extra(rng)) B(i, j) = B(j, i) = 1.0;
        // make it symmetric stochastic via the max-degree lazy walk
        double dmax = 0;
        for (int i = 0; i < n; ++i) dmax = std::max(dmax, B.row(i).sum() - 1.0);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && B(i, j) > 0) A(i, j) = 1.0 / (dmax + 1.0);
        for (int i = 0; i < n; ++i) A(i, i) = 1.0 - A.row(i).sum();
        const WeightedDigraph g{A};

        // independent all-pairs hop counts
        constexpr double inf = 1e18;
        Eigen::MatrixXd D = Eigen::MatrixXd::Constant(n, n, inf);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) D(i, j) = 0;
                else if (B(i, j) > 0) D(i, j) = 1;
            }
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) D(i, j) = std::min(D(i, j), D(i, k) + D(k, j));
        CHECK(diameter(g) == static_cast<int>(D.maxCoeff()));
    }
}

TEST_CASE("matrix power minimum entry") {
    CHECK(matrix_power_min_entry(WeightedDigraph(Eigen::MatrixXd::Identity(2, 2)), 5) == 0.0);
    CHECK(matrix_power_min_entry(WeightedDigraph(path3()), 2) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(matrix_power_min_entry(WeightedDigraph(complete_uniform(5)), 1) ==
          doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("positive power at and beyond the diameter") {
    std::mt19937_64 rng(7);
    for (int n : {3, 4, 6}) {
        const WeightedDigraph g{cycle_graph(n)};
        const int d = diameter(g);
        for (int k = d; k <= d + 2; ++k) CHECK(matrix_power_min_entry(g, k) > 0.0);
    }
}

TEST_CASE("balancedness") {
    CHECK(is_balanced(WeightedDigraph(cycle_graph(5))));
    CHECK(is_balanced(WeightedDigraph(directed_cycle(3))));
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.0, 0.5, 0.5;
    CHECK_FALSE(is_balanced(WeightedDigraph(A)));
}

TEST_CASE("strong connectivity") {
    CHECK(is_strongly_connected(WeightedDigraph(directed_cycle(3))));
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.0, 0.5, 0.5;
    CHECK_FALSE(is_strongly_connected(WeightedDigraph(A)));

    // two complementary directed chains; neither is strongly connected but
    // their union is
    const int n = 4;
    Eigen::MatrixXd fwd = Eigen::MatrixXd::Zero(n, n), bwd = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        fwd(i, i) = bwd(i, i) = 0.5;
        if (i + 1 < n) fwd(i, i + 1) = 0.5; else fwd(i, i) = 1.0;
        if (i > 0) bwd(i, i - 1) = 0.5; else bwd(i, i) = 1.0;
    }
    const WeightedDigraph g1{fwd}, g2{bwd};
    CHECK_FALSE(is_strongly_connected(g1));
    CHECK_FALSE(is_strongly_connected(g2));
    CHECK(is_strongly_connected(union_graphs({g1, g2})));
}

TEST_CASE("graph union") {
    const WeightedDigraph g{path3()};
    CHECK(union_graphs({g, g}).adjacency().isApprox(g.adjacency(), 1e-15));

    // opposite-orientation directed cycles average to a symmetric matrix
    const Eigen::MatrixXd sym =
        union_graphs({WeightedDigraph(directed_cycle(3)),
                      WeightedDigraph(Eigen::MatrixXd(directed_cycle(3).transpose()))})
            .adjacency();
    CHECK(sym.isApprox(sym.transpose(), 1e-15));

    std::mt19937_64 rng(3);
    const auto u = union_graphs({WeightedDigraph(random_strongly_connected(5, rng)),
                                 WeightedDigraph(random_strongly_connected(5, rng)),
                                 WeightedDigraph(random_strongly_connected(5, rng))});
    for (int i = 0; i < 5; ++i) CHECK(u.adjacency().row(i).sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("product positivity") {
    std::vector<WeightedDigraph> complete(3, WeightedDigraph(complete_uniform(3)));
    CHECK(product_positivity_check(complete) > 0.0);

    std::vector<WeightedDigraph> cycles(3, WeightedDigraph(directed_cycle(3)));
    const double min_entry = product_positivity_check(cycles);
    CHECK(min_entry > 0.0);
    // cross-check against the explicit product
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(3, 3);
    for (int i = 0; i < 3; ++i) prod = prod * directed_cycle(3);
    CHECK(min_entry == doctest::Approx(prod.minCoeff()).epsilon(1e-14));

    Eigen::MatrixXd reducible(3, 3);
    reducible << 1, 0, 0, 0.5, 0.5, 0, 0, 0.5, 0.5;
    CHECK_THROWS_AS(product_positivity_check({WeightedDigraph(directed_cycle(3)),
                                              WeightedDigraph(reducible),
                                              WeightedDigraph(directed_cycle(3))}),
                    PreconditionViolated);
}

TEST_CASE("product positivity property over random strongly connected graphs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        std::vector<WeightedDigraph> gs;
        for (int i = 0; i < n; ++i) gs.emplace_back(random_strongly_connected(n, rng));
        CHECK(product_positivity_check(gs) > 0.0);
    }
}

TEST_CASE("markov chain irreducibility and aperiodicity") {
    Eigen::MatrixXd flip(2, 2);
    flip << 0, 1, 1, 0;
    Eigen::MatrixXd mixing(2, 2);
    mixing << 0.5, 0.5, 0.5, 0.5;
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(2, 0.5);
    const std::vector<WeightedDigraph> gs{WeightedDigraph(complete_uniform(2)),
                                          WeightedDigraph(complete_uniform(2))};

    CHECK(markov_is_irreducible_aperiodic(MarkovTopology(gs, flip, uniform)) ==
          std::pair<bool, bool>{true, false});
    CHECK(markov_is_irreducible_aperiodic(MarkovTopology(gs, mixing, uniform)) ==
          std::pair<bool, bool>{true, true});
    CHECK(markov_is_irreducible_aperiodic(
              MarkovTopology(gs, Eigen::MatrixXd::Identity(2, 2), uniform)) ==
          std::pair<bool, bool>{false, true});
}

TEST_CASE("markov sample paths") {
    const std::vector<WeightedDigraph> gs{WeightedDigraph(complete_uniform(2)),
                                          WeightedDigraph(complete_uniform(2))};
    Eigen::VectorXd delta0(2);
    delta0 << 1.0, 0.0;

    {
        const MarkovTopology m(gs, Eigen::MatrixXd::Identity(2, 2), delta0);
        std::mt19937_64 rng(1);
        const auto path = markov_sample_path(m, 6, rng);
        CHECK(path == std::vector<int>{0, 0, 0, 0, 0, 0});
    }
    {
        Eigen::MatrixXd flip(2, 2);
        flip << 0, 1, 1, 0;
        const MarkovTopology m(gs, flip, delta0);
        std::mt19937_64 rng(1);
        const auto path = markov_sample_path(m, 5, rng);
        CHECK(path == std::vector<int>{0, 1, 0, 1, 0});
    }
    {
        Eigen::MatrixXd mixing(2, 2);
        mixing << 0.5, 0.5, 0.5, 0.5;
        const MarkovTopology m(gs, mixing, Eigen::VectorXd::Constant(2, 0.5));
        std::mt19937_64 rng(99);
        const auto path = markov_sample_path(m, 10000, rng);
        const double freq0 =
            static_cast<double>(std::count(path.begin(), path.end(), 0)) / 10000.0;
        CHECK(std::abs(freq0 - 0.5) < 0.02);

        std::mt19937_64 rng_a(5), rng_b(5);
        CHECK(markov_sample_path(m, 100, rng_a) == markov_sample_path(m, 100, rng_b));
    }
}

TEST_CASE("markov positivity index") {
    const std::vector<WeightedDigraph> gs{WeightedDigraph(complete_uniform(2)),
                                          WeightedDigraph(complete_uniform(2))};
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(2, 0.5);
    Eigen::MatrixXd mixing(2, 2);
    mixing << 0.5, 0.5, 0.5, 0.5;
    CHECK(markov_positivity_index(MarkovTopology(gs, mixing, uniform)) == 1);

    Eigen::MatrixXd lazy_flip(2, 2);
    lazy_flip << 0.5, 0.5, 1.0, 0.0;
    CHECK(markov_positivity_index(MarkovTopology(gs, lazy_flip, uniform)) == 2);

    Eigen::MatrixXd flip(2, 2);
    flip << 0, 1, 1, 0;
    CHECK(markov_positivity_index(MarkovTopology(gs, flip, uniform)) == -1);
}
