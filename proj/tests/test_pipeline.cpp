#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "bcvi/cvi_hard.hpp"
#include "bcvi/cvi_soft.hpp"
#include "bcvi/pipeline.hpp"

using namespace bcvi;

namespace {

MixtureSpec five_blobs(std::uint64_t seed = 7)
{
    std::vector<Eigen::VectorXd> centers{Eigen::Vector2d(0, 0), Eigen::Vector2d(15, 0), Eigen::Vector2d(0, 15),
                                         Eigen::Vector2d(15, 15), Eigen::Vector2d(30, 7)};
    return gaussian_blobs(centers, 1.0, 300, seed);
}

PipelineConfig base_config()
{
    PipelineConfig c;
    c.mixture = five_blobs();
    c.max_k = 8;
    c.run.restarts = 5;
    return c;
}

} // namespace

TEST_CASE("config validation")
{
    auto c = base_config();
    CHECK_NOTHROW(validate(c));

    auto both = c;
    both.data_path = "x.csv";
    CHECK_THROWS_AS(validate(both), ConfigError);
    auto none = c;
    none.mixture.reset();
    CHECK_THROWS_AS(validate(none), ConfigError);

    auto mismatch = c;
    mismatch.index = IndexKind::xb;
    CHECK_THROWS_AS(validate(mismatch), ConfigError);

    auto small = c;
    small.max_k = 2;
    CHECK_THROWS_AS(validate(small), ConfigError);

    auto top = c;
    top.top_m = 8;
    CHECK_THROWS_AS(validate(top), ConfigError);

    auto alpha = c;
    alpha.prior.alpha = {1, 2};
    CHECK_THROWS_AS(validate(alpha), ConfigError);

    auto gd = c;
    gd.prior.kind = PriorKind::generalized_dirichlet;
    gd.prior.beta = {1.0};
    CHECK_NOTHROW(validate(gd));
    gd.prior.profile = PriorProfile::small;
    CHECK_THROWS_AS(validate(gd), ConfigError);

    auto fuzz = c;
    fuzz.algorithm = Algorithm::fcm;
    fuzz.index = IndexKind::wp;
    fuzz.fuzziness = 1.0;
    CHECK_THROWS_AS(validate(fuzz), ConfigError);

    CHECK(parse_index("kwon2") == IndexKind::kwon2);
    CHECK_THROWS_AS(parse_index("silhouette"), ConfigError);
    CHECK(parse_algorithm("fcm") == Algorithm::fcm);
    CHECK_THROWS_AS(parse_algorithm("dbscan"), ConfigError);
}

TEST_CASE("k-means + WI pipeline finds five clusters")
{
    const auto c = base_config();
    const auto data = load_input(c);
    const auto rep = run_pipeline(data, c);
    REQUIRE(rep.records.size() == 7);
    CHECK(rep.confidence.ranking.front() == 5);
    CHECK(rep.accuracy);
    CHECK(*rep.accuracy >= 0.95);
    CHECK(rep.accuracy_k == 5);
    CHECK(rep.objectives.size() == 8);
    CHECK(rep.correlation_profile.size() == 9);

    double total = 0.0;
    for (const auto& r : rep.records)
        total += r.posterior_mean;
    CHECK(std::abs(total - 1.0) <= 1e-10);

    // gi_value column equals the index computed directly.
    HardPath<double> path;
    for (int k = 2; k <= 9; ++k)
        path.emplace(k, kmeans(data.points(), k, c.run));
    const auto wi = wi_series(data.points(), path, 8);
    for (const auto& r : rep.records)
        CHECK(r.gi_value == wi.at(r.k));
}

TEST_CASE("every index runs end to end and produces a valid report")
{
    for (auto index : {IndexKind::db, IndexKind::str, IndexKind::wi, IndexKind::xb, IndexKind::kwon2, IndexKind::wp}) {
        auto c = base_config();
        c.index = index;
        c.algorithm = algorithm_for(index);
        const auto rep = run_pipeline(c);
        CAPTURE(to_string(index));
        const auto j = to_json(rep);
        CHECK_NOTHROW(validate_report_json(j));
        CHECK(j["metadata"]["index"] == to_string(index));
        if (index == IndexKind::wp)
            CHECK(j["metadata"]["gamma"] == 2.0);
        else
            CHECK(j["metadata"]["gamma"].is_null());
    }
}

TEST_CASE("GD and profile priors in the pipeline")
{
    auto c = base_config();
    c.prior.kind = PriorKind::generalized_dirichlet;
    c.prior.alpha = {1.0};
    c.prior.beta = {1.0};
    const auto gd = run_pipeline(c);
    CHECK(gd.posterior_beta.size() == 6);
    CHECK_NOTHROW(validate_report_json(to_json(gd)));

    auto p = base_config();
    p.prior.profile = PriorProfile::large;
    const auto rep = run_pipeline(p);
    REQUIRE(rep.prior_profile);
    CHECK(rep.prior_alpha.size() == 7);
    CHECK(rep.prior_alpha[6] == doctest::Approx(20.0 * std::sqrt(300.0))); // k=8
    CHECK(rep.prior_alpha[0] == doctest::Approx(std::sqrt(300.0)));
}

TEST_CASE("pipeline is deterministic")
{
    const auto c = base_config();
    CHECK(to_json(run_pipeline(c)).dump() == to_json(run_pipeline(c)).dump());
}

TEST_CASE("accuracy gate")
{
    auto c = base_config();
    c.require_accuracy = 0.9;
    CHECK_NOTHROW(run_pipeline(c));

    // Overlapping blobs cannot reach perfect accuracy.
    auto hard = base_config();
    hard.mixture = gaussian_blobs({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)}, 2.0, 200, 3);
    hard.require_accuracy = 0.999;
    CHECK_THROWS_AS(run_pipeline(hard), DataError);
}

TEST_CASE("errors carry the offending k")
{
    // Eight points on two spots: k >= 3 has coincident centroids.
    Eigen::MatrixXd x(8, 1);
    x << 0, 0, 0, 0, 1, 1, 1, 1;
    auto c = base_config();
    c.max_k = 4;
    c.index = IndexKind::db;
    c.mixture.reset();
    c.data_path = "unused";
    try {
        run_pipeline(Dataset::make(x), c);
        FAIL("expected IndexError");
    } catch (const IndexError& e) {
        CHECK(std::string(e.what()).find("k=3") != std::string::npos);
    }

    c.max_k = 9;
    CHECK_THROWS_AS(run_pipeline(Dataset::make(x), c), ConfigError);
}

TEST_CASE("report schema rejects malformed documents")
{
    const auto good = to_json(run_pipeline(base_config()));
    CHECK_NOTHROW(validate_report_json(good));

    auto bad = good;
    bad["format"] = "other";
    CHECK_THROWS_AS(validate_report_json(bad), DataError);
    bad = good;
    bad["records"].erase(0);
    CHECK_THROWS_AS(validate_report_json(bad), DataError);
    bad = good;
    bad["records"][0]["posterior_mean"] = 0.9;
    CHECK_THROWS_AS(validate_report_json(bad), DataError);
    bad = good;
    bad["records"][1]["rank"] = bad["records"][0]["rank"];
    CHECK_THROWS_AS(validate_report_json(bad), DataError);
    bad = good;
    bad["metadata"]["direction"] = "C";
    CHECK_THROWS_AS(validate_report_json(bad), DataError);

    const auto recs = records_from_json(good);
    CHECK(recs.size() == 7);
    CHECK(recs[0].k == 2);
    CHECK(recs[3].posterior_mean == good["records"][3]["posterior_mean"].get<double>());
}

TEST_CASE("plot rows")
{
    std::vector<KRecord> recs{{2, 0, 0, 6.0 / 13.0, 0.13, 1},
                              {3, 0, 0, 4.0 / 13.0, 0.12, 2},
                              {4, 0, 0, 3.0 / 13.0, 0.11, 3}};
    const auto rows = plot_rows(recs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].lo == doctest::Approx(6.0 / 13.0 - 0.26));
    CHECK(rows[0].hi == doctest::Approx(6.0 / 13.0 + 0.26));
    CHECK(rows[2].lo == doctest::Approx(3.0 / 13.0 - 0.22));

    std::vector<KRecord> edge{{2, 0, 0, 0.5, 0.0, 1}, {3, 0, 0, 0.02, 0.05, 2}, {4, 0, 0, 0.9, 0.2, 3}};
    const auto e = plot_rows(edge);
    CHECK(e[0].lo == 0.5);
    CHECK(e[0].hi == 0.5);
    CHECK(e[1].lo == 0.0);
    CHECK(e[2].hi == 1.0);

    const auto csv = plot_csv(e);
    CHECK(csv.rfind("k,mean,lo,hi\n2,0.5,0.5,0.5\n", 0) == 0);

    const auto path = std::filesystem::temp_directory_path() / "bcvi_plot_test.csv";
    ReportBundle rep;
    rep.records = edge;
    emit_plot_data(rep, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,mean,lo,hi");
    CHECK_THROWS_AS(emit_plot_data(rep, "/nonexistent/dir/plot.csv"), IoError);
}
