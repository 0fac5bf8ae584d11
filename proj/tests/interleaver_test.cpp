#include "ilv/interleaver.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "ilv/junction.hpp"
#include "ilv/permutation.hpp"
#include "ilv/rng.hpp"

using namespace ilv;

namespace {

// The worked reference junction: p=32, fo=2, z=8, so 4 rows per memory and
// a 64-edge block cycle.
JunctionConfig reference_config() { return JunctionConfig::create(32, 32, 2, 8); }

const std::vector<std::uint32_t> kReferenceR = {2, 0, 3, 1};

InterleaverBuild reference_build() {
  InterleaverBuild::TableOverrides tables;
  tables.base_perms.push_back(kReferenceR);
  return InterleaverBuild::from_tables(reference_config(), VariantSet{}, std::move(tables));
}

bool is_perm_of(const std::vector<std::uint32_t>& v, std::uint32_t n) {
  if (v.size() != n) return false;
  std::vector<std::uint32_t> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < n; ++i)
    if (sorted[i] != i) return false;
  return true;
}

// Random but valid junction shapes; variants may still reject some.
std::vector<JunctionConfig> sample_shapes(std::uint32_t count, std::uint64_t seed,
                                          bool sv_capable, bool ss_capable) {
  std::mt19937_64 g(seed);
  std::vector<JunctionConfig> out;
  const std::uint32_t zs[] = {1, 2, 3, 4, 6, 8, 16, 32};
  const std::uint32_t ms[] = {1, 2, 3, 4, 5, 8, 16};
  while (out.size() < count) {
    std::uint32_t z = zs[bounded(g, std::size(zs))];
    std::uint32_t m = ms[bounded(g, std::size(ms))];
    if (sv_capable && z <= m) continue;
    std::uint32_t p = z * m;
    if (p > 1024) continue;
    std::uint32_t fo = static_cast<std::uint32_t>(1 + bounded(g, 8));
    if (ss_capable && fo < 2) continue;
    std::uint64_t edges = static_cast<std::uint64_t>(p) * fo;
    std::vector<std::uint32_t> fis;
    for (std::uint32_t fi = 1; fi <= p; ++fi)
      if (edges % fi == 0 && fo <= edges / fi) fis.push_back(fi);
    if (fis.empty()) continue;
    std::uint32_t fi = fis[bounded(g, fis.size())];
    out.push_back(JunctionConfig::create(p, static_cast<std::uint32_t>(edges / fi), fo, z));
  }
  return out;
}

}  // namespace

TEST(JunctionConfigTest, DerivesFanInAndCounts) {
  JunctionConfig c = reference_config();
  EXPECT_EQ(c.fan_in, 2u);
  EXPECT_EQ(c.edge_count, 64u);
  EXPECT_EQ(c.bank_rows(), 4u);
  EXPECT_EQ(c.sweeps(), 2u);
  EXPECT_EQ(c.total_cycles(), 8u);
  EXPECT_EQ(c.cycles_per_sweep(), 4u);
}

TEST(JunctionConfigTest, RejectsBadShapes) {
  EXPECT_THROW(JunctionConfig::create(0, 4, 1, 1), ConfigError);
  EXPECT_THROW(JunctionConfig::create(10, 3, 1, 2), ConfigError);   // 10 edges, 3 rights
  EXPECT_THROW(JunctionConfig::create(4, 2, 1, 3), ConfigError);    // z does not divide p
  EXPECT_THROW(JunctionConfig::create(4, 16, 2, 2), ConfigError);   // fi would exceed... fo > n? no: fi < 1
  EXPECT_THROW(JunctionConfig::create(2, 1, 2, 1), ConfigError);    // fo exceeds n? 2 > 1
}

TEST(JunctionConfigTest, WarnsOnNonPowerOfTwoParallelism) {
  EXPECT_FALSE(JunctionConfig::create(12, 4, 1, 6).warnings().empty());
  EXPECT_TRUE(JunctionConfig::create(32, 32, 2, 8).warnings().empty());
}

TEST(VariantSetTest, ParseAndPrintRoundTrip) {
  for (const VariantSet& v : VariantSet::all())
    EXPECT_EQ(VariantSet::parse(v.to_string()), v);
  EXPECT_EQ(VariantSet::parse("md+sv").to_string(), "sv+md");
  EXPECT_THROW(VariantSet::parse("sv+xx"), ParseError);
  EXPECT_EQ(VariantSet::all().size(), 8u);
}

TEST(BasePermTest, SingleRowIsIdentity) {
  std::mt19937_64 g(1);
  EXPECT_EQ(make_base_perm(g, 1), std::vector<std::uint32_t>{0});
  EXPECT_THROW(make_base_perm(g, 0), ConfigError);
}

TEST(BasePermTest, UniformPermutationsAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto g = make_engine(seed, Stream::base_perm);
    EXPECT_TRUE(is_perm_of(make_base_perm(g, 17), 17));
  }
}

TEST(StartVectorTest, ReplicatesWhenWiderThanRows) {
  std::vector<std::uint32_t> s =
      make_start_vector({kReferenceR}, 8, 4, /*sv=*/false);
  EXPECT_EQ(s, (std::vector<std::uint32_t>{2, 0, 3, 1, 2, 0, 3, 1}));
  // Partial tail wraps back to the front of r.
  EXPECT_EQ(make_start_vector({kReferenceR}, 10, 4, false),
            (std::vector<std::uint32_t>{2, 0, 3, 1, 2, 0, 3, 1, 2, 0}));
}

TEST(StartVectorTest, TruncatesWhenNarrowerThanRows) {
  EXPECT_EQ(make_start_vector({kReferenceR}, 2, 4, false),
            (std::vector<std::uint32_t>{2, 0}));
}

TEST(StartVectorTest, ShuffledVariantConcatenatesIndependentPerms) {
  std::vector<std::vector<std::uint32_t>> perms = {{2, 0, 3, 1}, {3, 0, 1, 2}, {1, 0, 3, 2}};
  std::vector<std::uint32_t> s = make_start_vector(perms, 10, 4, /*sv=*/true);
  EXPECT_EQ(s, (std::vector<std::uint32_t>{2, 0, 3, 1, 3, 0, 1, 2, 1, 0}));
  // sv needs strictly more memories than rows.
  EXPECT_THROW(make_start_vector({perms[0]}, 4, 4, true), VariantError);
  // Wrong number of blocks.
  EXPECT_THROW(make_start_vector(perms, 16, 4, true), ConfigError);
}

TEST(RowScheduleTest, MatchesWorkedReference) {
  std::vector<std::uint32_t> s = {2, 0, 3, 1, 2, 0, 3, 1};
  std::vector<std::uint32_t> expected = {2, 0, 3, 1, 2, 0, 3, 1, 3, 1, 0, 2, 3, 1, 0, 2,
                                         0, 2, 1, 3, 0, 2, 1, 3, 1, 3, 2, 0, 1, 3, 2, 0};
  EXPECT_EQ(make_row_schedule(s, 32, 4), expected);
}

TEST(RowScheduleTest, SingleLaneCountsThroughRows) {
  EXPECT_EQ(make_row_schedule({0}, 3, 3), (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(RowScheduleTest, EveryRowAppearsOncePerLane) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = make_engine(seed, Stream::base_perm);
    std::uint32_t m = 4, z = 8, p = 32;
    std::vector<std::uint32_t> s = make_start_vector({make_base_perm(g, m)}, z, m, false);
    std::vector<std::uint32_t> t = make_row_schedule(s, p, m);
    std::vector<std::uint32_t> counts(m, 0);
    for (std::uint32_t v : t) ++counts[v];
    for (std::uint32_t c : counts) EXPECT_EQ(c, z);
  }
}

TEST(RowScheduleTest, ClosedFormMatchesCycleIteration) {
  std::vector<std::uint32_t> s = {1, 3, 0, 2, 2, 0};
  std::uint32_t m = 4, z = 6, p = 24;
  std::vector<std::uint32_t> t = make_row_schedule(s, p, m);
  std::vector<std::uint32_t> by_cycles;
  for (std::uint32_t cycle = 0; cycle < m; ++cycle)
    for (std::uint32_t lane = 0; lane < z; ++lane)
      by_cycles.push_back((s[lane] + cycle) % m);
  EXPECT_EQ(t, by_cycles);
}

TEST(WeightMapTest, WorkedReferenceValues) {
  InterleaverBuild b = reference_build();
  EXPECT_EQ(b.map_weight(45), 27u);
  EXPECT_EQ(b.map_weight(13), 26u);
  EXPECT_EQ(b.map_weight(0), 32u);
  EXPECT_EQ(b.left_neuron(45), 13u);
  EXPECT_EQ(b.left_neuron(13), 13u);
  EXPECT_THROW(b.map_weight(64), std::out_of_range);
  Permutation pw = b.weight_permutation();
  EXPECT_EQ(pw[45], 27u);
  EXPECT_EQ(pw.size(), 64u);
}

TEST(WeightMapTest, TrivialJunctionIsIdentity) {
  JunctionConfig c = JunctionConfig::create(1, 1, 1, 1);
  InterleaverBuild b = InterleaverBuild::generate(c, VariantSet{}, 9);
  EXPECT_EQ(b.map_weight(0), 0u);
  EXPECT_EQ(b.weight_permutation().size(), 1u);
}

TEST(WeightMapTest, FanOutOneCollapsesToLeftNeuron) {
  JunctionConfig c = JunctionConfig::create(24, 8, 1, 4);
  InterleaverBuild b = InterleaverBuild::generate(c, VariantSet{}, 5);
  for (std::uint64_t i = 0; i < c.edge_count; ++i)
    EXPECT_EQ(b.map_weight(i), b.left_neuron(i));
}

TEST(NeuronMapTest, RightNeuronGroupsByFanIn) {
  JunctionConfig c = JunctionConfig::create(12, 4, 1, 6);  // fi = 3
  EXPECT_EQ(right_neuron_of(c, 0), 0u);
  EXPECT_EQ(right_neuron_of(c, 2), 0u);
  EXPECT_EQ(right_neuron_of(c, 3), 1u);
  JunctionConfig wide = JunctionConfig::create(1024, 64, 1, 4);  // fi = 16
  EXPECT_EQ(right_neuron_of(wide, 255), 15u);
  JunctionConfig narrow = JunctionConfig::create(8, 8, 1, 2);  // fi = 1
  for (std::uint64_t i = 0; i < narrow.edge_count; ++i) EXPECT_EQ(right_neuron_of(narrow, i), i);
  EXPECT_THROW(right_neuron_of(narrow, narrow.edge_count), std::out_of_range);
}

TEST(ActivationMapTest, WorkedReferenceValues) {
  InterleaverBuild b = reference_build();
  Permutation pa = b.activation_permutation(0);
  EXPECT_EQ(pa[13], 13u);
  EXPECT_EQ(pa[0], 16u);
  EXPECT_THROW(b.activation_permutation(2), std::out_of_range);
}

TEST(ActivationMapTest, SweepsShareScheduleUnlessShuffled) {
  JunctionConfig c = reference_config();
  InterleaverBuild basic = InterleaverBuild::generate(c, VariantSet{}, 3);
  EXPECT_EQ(basic.activation_permutation(0), basic.activation_permutation(1));
  InterleaverBuild ss = InterleaverBuild::generate(c, VariantSet{false, true, false}, 3);
  EXPECT_NE(ss.activation_permutation(0).values(), ss.activation_permutation(1).values());
}

TEST(ActivationMapTest, MemoryTermMatchesLane) {
  // left % z is the lane for plain builds and the dithered lane for md.
  JunctionConfig c = JunctionConfig::create(64, 64, 4, 16);
  for (const VariantSet& vs : VariantSet::all()) {
    InterleaverBuild b = InterleaverBuild::generate(c, vs, 11);
    for (std::uint64_t i = 0; i < c.edge_count; ++i) {
      std::uint32_t lane = static_cast<std::uint32_t>(i % c.parallelism);
      std::uint32_t expect =
          vs.md ? b.tables().dithers[i / c.parallelism][lane] : lane;
      EXPECT_EQ(b.left_neuron(i) % c.parallelism, expect);
    }
  }
}

TEST(GenerateTest, AllVariantsBijectiveOnRandomShapes) {
  for (const VariantSet& vs : VariantSet::all()) {
    std::vector<JunctionConfig> shapes = sample_shapes(8, 100 + vs.bits(), vs.sv, vs.ss);
    for (const JunctionConfig& c : shapes) {
      InterleaverBuild b = InterleaverBuild::generate(c, vs, 77 + vs.bits());
      EXPECT_NO_THROW(b.weight_permutation()) << vs.to_string();
      for (std::uint32_t k = 0; k < c.sweeps(); ++k)
        EXPECT_NO_THROW(b.activation_permutation(k)) << vs.to_string();
    }
  }
}

TEST(GenerateTest, TableShapesFollowVariant) {
  JunctionConfig c = JunctionConfig::create(64, 64, 4, 16);  // m = 4
  for (const VariantSet& vs : VariantSet::all()) {
    InterleaverBuild b = InterleaverBuild::generate(c, vs, 21);
    std::size_t sweep_tables = vs.ss ? c.fan_out : 1;
    std::size_t blocks = vs.sv ? 4 : 1;  // ceil(16 / 4)
    EXPECT_EQ(b.tables().start_vectors.size(), sweep_tables);
    EXPECT_EQ(b.tables().row_schedules.size(), sweep_tables);
    EXPECT_EQ(b.tables().base_perms.size(), sweep_tables * blocks);
    EXPECT_EQ(b.tables().dithers.size(), vs.md ? c.total_cycles() : 0u);
    for (const auto& r : b.tables().base_perms) EXPECT_TRUE(is_perm_of(r, c.bank_rows()));
    for (const auto& v : b.tables().dithers) EXPECT_TRUE(is_perm_of(v, c.parallelism));
    for (const auto& s : b.tables().start_vectors) EXPECT_EQ(s.size(), c.parallelism);
  }
}

TEST(GenerateTest, DitherIsOnePermutationReplicatedPerCycle) {
  JunctionConfig c = JunctionConfig::create(64, 64, 4, 16);
  InterleaverBuild b = InterleaverBuild::generate(c, VariantSet{false, false, true}, 4);
  ASSERT_EQ(b.tables().dithers.size(), c.total_cycles());
  for (const auto& v : b.tables().dithers) EXPECT_EQ(v, b.tables().dithers[0]);
}

TEST(GenerateTest, Deterministic) {
  JunctionConfig c = JunctionConfig::create(64, 128, 4, 16);
  for (const VariantSet& vs : VariantSet::all()) {
    InterleaverBuild a = InterleaverBuild::generate(c, vs, 1234);
    InterleaverBuild b = InterleaverBuild::generate(c, vs, 1234);
    EXPECT_EQ(a.tables().base_perms, b.tables().base_perms);
    EXPECT_EQ(a.tables().start_vectors, b.tables().start_vectors);
    EXPECT_EQ(a.tables().row_schedules, b.tables().row_schedules);
    EXPECT_EQ(a.tables().dithers, b.tables().dithers);
    EXPECT_EQ(a.weight_permutation(), b.weight_permutation());
    InterleaverBuild other = InterleaverBuild::generate(c, vs, 1235);
    EXPECT_NE(other.weight_permutation(), a.weight_permutation());
  }
}

TEST(GenerateTest, StreamsAreIndependent) {
  // Adding the dither draw must not disturb the base permutation stream.
  JunctionConfig c = JunctionConfig::create(64, 64, 4, 16);
  InterleaverBuild plain = InterleaverBuild::generate(c, VariantSet{}, 8);
  InterleaverBuild dithered = InterleaverBuild::generate(c, VariantSet{false, false, true}, 8);
  EXPECT_EQ(plain.tables().base_perms, dithered.tables().base_perms);
  EXPECT_EQ(plain.tables().row_schedules, dithered.tables().row_schedules);
}

TEST(GenerateTest, VariantGatingErrors) {
  JunctionConfig square = JunctionConfig::create(16, 16, 2, 4);  // z == p/z
  EXPECT_THROW(InterleaverBuild::generate(square, VariantSet{true, false, false}, 1),
               VariantError);
  JunctionConfig single_sweep = JunctionConfig::create(16, 16, 1, 4);
  EXPECT_THROW(InterleaverBuild::generate(single_sweep, VariantSet{false, true, false}, 1),
               VariantError);
}

TEST(InjectTest, RoundTripsGeneratedTables) {
  JunctionConfig c = JunctionConfig::create(64, 64, 4, 16);
  for (const VariantSet& vs : VariantSet::all()) {
    InterleaverBuild a = InterleaverBuild::generate(c, vs, 31);
    InterleaverBuild::TableOverrides tables;
    tables.base_perms = a.tables().base_perms;
    tables.start_vectors = a.tables().start_vectors;
    tables.dithers = a.tables().dithers;
    InterleaverBuild b = InterleaverBuild::from_tables(c, vs, std::move(tables), a.seed());
    EXPECT_EQ(a.weight_permutation(), b.weight_permutation()) << vs.to_string();
  }
}

TEST(InjectTest, RejectsMalformedTables) {
  JunctionConfig c = reference_config();
  InterleaverBuild::TableOverrides bad;
  bad.base_perms.push_back({2, 0, 3, 3});  // repeated value
  EXPECT_THROW(
      InterleaverBuild::from_tables(c, VariantSet{}, std::move(bad)), ConsistencyError);
  InterleaverBuild::TableOverrides wrong_count;
  wrong_count.base_perms.push_back(kReferenceR);
  wrong_count.dithers.push_back({0, 1, 2, 3, 4, 5, 6, 7});
  EXPECT_THROW(InterleaverBuild::from_tables(c, VariantSet{}, std::move(wrong_count)),
               ConfigError);
  InterleaverBuild::TableOverrides md_missing;
  md_missing.base_perms.push_back(kReferenceR);
  EXPECT_THROW(InterleaverBuild::from_tables(c, VariantSet{false, false, true},
                                             std::move(md_missing)),
               ConfigError);
}

TEST(InjectTest, PerCycleDithersAreRepresentable) {
  // Distinct per-cycle dithers are legal inputs; they simply lose the
  // bijectivity guarantee, which surfaces as a consistency error.
  JunctionConfig c = reference_config();
  InterleaverBuild::TableOverrides tables;
  tables.base_perms.push_back(kReferenceR);
  std::vector<std::uint32_t> identity = {0, 1, 2, 3, 4, 5, 6, 7};
  for (std::uint64_t k = 0; k < c.total_cycles(); ++k) tables.dithers.push_back(identity);
  tables.dithers[1] = {2, 7, 3, 0, 6, 5, 1, 4};
  InterleaverBuild b =
      InterleaverBuild::from_tables(c, VariantSet{false, false, true}, std::move(tables));
  EXPECT_THROW(b.weight_permutation(), ConsistencyError);
}

TEST(InjectTest, StartVectorInjectionBypassesBasePerms) {
  JunctionConfig c = reference_config();
  InterleaverBuild::TableOverrides tables;
  tables.start_vectors.push_back({2, 0, 3, 1, 2, 0, 3, 1});
  InterleaverBuild b = InterleaverBuild::from_tables(c, VariantSet{}, std::move(tables));
  EXPECT_EQ(b.map_weight(45), 27u);
  EXPECT_TRUE(b.tables().base_perms.empty());
}
