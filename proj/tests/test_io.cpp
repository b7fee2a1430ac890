#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "dynlsm/engine.hpp"
#include "dynlsm/io.hpp"
#include "support/fixtures.hpp"

using namespace dynlsm;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "dynlsm_io_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

io::FitArchive small_archive(LikelihoodKind kind) {
  const auto data = fixture::random_series(kind, 5, 3, 3);
  ModelConfig cfg;
  cfg.max_iters = 3;
  cfg.seed = 17;
  io::FitArchive a;
  a.config = cfg;
  a.data = {kind, data.n, data.T, data.noise_sd, 99};
  a.result = fit(data, cfg);
  return a;
}

}  // namespace

TEST(SeriesCsv, TwoRowFile) {
  std::istringstream in(
      "# n=2,T=1,kind=bernoulli,noise_sd=1,seed=4\n"
      "t,i,j,value\n"
      "1,1,2,1\n");
  const auto f = io::read_series(in);
  EXPECT_EQ(f.series.n, 2);
  EXPECT_EQ(f.series.observed_count(), 1);
  EXPECT_EQ(f.series.values[0](1, 0), 1.0);
  EXPECT_EQ(f.seed, 4u);
}

TEST(SeriesCsv, AbsentRowsAreMissingUnlessDense) {
  const std::string text =
      "# n=3,T=1,kind=bernoulli\n"
      "t,i,j,value\n"
      "1,1,2,1\n";
  std::istringstream a(text), b(text);
  EXPECT_EQ(io::read_series(a).series.observed_count(), 1);
  const auto dense = io::read_series(b, {true}).series;
  EXPECT_EQ(dense.observed_count(), 3);
  EXPECT_EQ(dense.values[0](0, 2), 0.0);
}

TEST(SeriesCsv, DuplicateRowNamesLine) {
  std::istringstream in(
      "# n=3,T=1,kind=gaussian,noise_sd=1\n"
      "t,i,j,value\n"
      "1,1,2,0.5\n"
      "1,2,3,0.5\n"
      "1,2,1,0.5\n");
  try {
    io::read_series(in);
    FAIL() << "expected a DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(SeriesCsv, RejectsOutOfRangeIndex) {
  std::istringstream in(
      "# n=2,T=1,kind=bernoulli\n"
      "t,i,j,value\n"
      "1,1,3,1\n");
  EXPECT_THROW(io::read_series(in), DataError);
}

TEST(SeriesCsv, RoundTrip) {
  auto series = fixture::random_series(LikelihoodKind::gaussian, 6, 3, 5, 0.3);
  series.mask[2](1, 4) = series.mask[2](4, 1) = false;
  std::ostringstream out;
  io::write_series(out, {series, 12});
  std::istringstream in(out.str());
  const auto back = io::read_series(in);
  EXPECT_EQ(back.seed, 12u);
  EXPECT_EQ(back.series.noise_sd, 0.3);
  for (Index t = 0; t < 3; ++t) {
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) {
        EXPECT_EQ(back.series.observed(t, i, j), series.observed(t, i, j));
        if (series.observed(t, i, j)) {
          EXPECT_EQ(back.series.values[t](i, j), series.values[t](i, j));
        }
      }
  }
  std::ostringstream again;
  io::write_series(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(EdgeTable, RoundTrip) {
  io::EdgeTable t;
  t.comment = "family=smf";
  t.column = "score";
  t.edges = {{0, 0, 1}, {2, 3, 5}};
  t.values = {0.25, 1.0 / 3.0};
  std::ostringstream out;
  io::write_edge_table(out, t);
  std::istringstream in(out.str());
  const auto back = io::read_edge_table(in);
  EXPECT_EQ(back.comment, t.comment);
  EXPECT_EQ(back.column, "score");
  ASSERT_EQ(back.edges.size(), 2u);
  EXPECT_EQ(back.edges[1].j, 5);
  EXPECT_EQ(back.values[1], 1.0 / 3.0);
}

TEST(Trajectory, RoundTrip) {
  io::TrajectoryFile f;
  f.comment = "seed=1";
  f.positions = {Eigen::MatrixXd::Random(4, 2), Eigen::MatrixXd::Random(4, 2)};
  std::ostringstream out;
  io::write_trajectory(out, f);
  std::istringstream in(out.str());
  const auto back = io::read_trajectory(in);
  ASSERT_EQ(back.positions.size(), 2u);
  EXPECT_EQ(back.positions[1], f.positions[1]);
}

TEST(Archive, SaveLoadSaveIsByteIdentical) {
  for (auto kind : {LikelihoodKind::bernoulli, LikelihoodKind::gaussian})
    for (bool xi : {false, true}) {
      const auto a = small_archive(kind);
      const auto p1 = temp_path("a1.json"), p2 = temp_path("a2.json");
      io::save_archive(p1, a, xi);
      const auto loaded = io::load_archive(p1);
      io::save_archive(p2, loaded, xi);
      EXPECT_EQ(io::read_file(p1), io::read_file(p2));
      EXPECT_TRUE(loaded.result.state.mean == a.result.state.mean);
      EXPECT_EQ(loaded.result.iterations, a.result.iterations);
      EXPECT_EQ(loaded.config.seed, 17u);
      EXPECT_EQ(loaded.data.seed, 99u);
      if (xi && kind == LikelihoodKind::bernoulli) {
        EXPECT_TRUE(loaded.result.state.xi == a.result.state.xi);
      }
    }
}

TEST(Archive, TruncatedOrWrongVersionIsDataError) {
  const auto text = io::archive_to_json(small_archive(LikelihoodKind::bernoulli), false);
  EXPECT_THROW(io::archive_from_json(text.substr(0, text.size() / 2)), DataError);
  std::string other = text;
  other.replace(other.find(io::kArchiveVersion), 13, "dynlsm-fit-v9");
  EXPECT_THROW(io::archive_from_json(other), DataError);
}

TEST(Archive, MissingFieldIsNamed) {
  std::string text = io::archive_to_json(small_archive(LikelihoodKind::bernoulli), false);
  const auto pos = text.find("\"alpha\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 7, "\"alphx\"");
  try {
    io::archive_from_json(text);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("alph"), std::string::npos) << e.what();
  }
}

TEST(Config, RoundTripAndUnknownKeys) {
  ModelConfig cfg;
  cfg.family = Family::mf;
  cfg.scales = AdaptiveNodewise{{0.7, 0.6, 2.0, 1.5}};
  cfg.stop_tol = 0.02;
  const auto back = io::config_from_json(io::config_to_json(cfg));
  EXPECT_EQ(back.family, Family::mf);
  ASSERT_TRUE(back.nodewise());
  EXPECT_EQ(std::get<AdaptiveNodewise>(back.scales).hyper.c_tau, 2.0);
  EXPECT_EQ(back.stop_tol, 0.02);
  EXPECT_EQ(io::config_to_json(back), io::config_to_json(cfg));

  EXPECT_THROW(io::config_from_json(R"({"alpah": 0.9})"), ConfigError);
  EXPECT_EQ(io::config_from_json(R"({"alpha": 0.9})").d, 2);
}

TEST(Format, SeventeenDigitsAndFiniteOnly) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(2.0), "2");
  EXPECT_THROW(io::format_double(NAN), NumericError);
}

TEST(Metrics, JsonOmitsAbsentFields) {
  io::Metrics m;
  m.count = 3;
  m.auc = 0.75;
  const auto j = io::metrics_to_json(m);
  EXPECT_NE(j.find("\"auc\""), std::string::npos);
  EXPECT_EQ(j.find("\"pcc\""), std::string::npos);
}
