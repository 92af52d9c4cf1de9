#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "nxbench/catalog.hpp"
#include "nxbench/error.hpp"
#include "nxbench/feeds.hpp"
#include "nxbench/generators.hpp"
#include "nxbench/rng.hpp"
#include "support.hpp"

using namespace nxbench;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

GeneratorSpec fixed_list(std::vector<std::string> words, std::vector<std::string> tlds) {
  GeneratorSpec g;
  g.archetype = Archetype::fixed_list;
  g.seed = 3;
  g.words = std::move(words);
  g.tld_pool = std::move(tlds);
  return g;
}

std::set<std::string> texts(const std::vector<Sample>& s) {
  std::set<std::string> out;
  for (const auto& x : s) out.insert(x.domain.text());
  return out;
}

}  // namespace

TEST_SUITE("domain") {
  TEST_CASE("parse lowercases and keeps labels") {
    const auto d = DomainName::parse("Mail.Example.COM");
    CHECK(d.text() == "mail.example.com");
    REQUIRE(d.labels().size() == 3);
    CHECK(d.labels()[1] == "example");
  }

  TEST_CASE("invalid names are rejected") {
    CHECK_FALSE(DomainName::try_parse("a.b"));                   // too short
    CHECK_FALSE(DomainName::try_parse(".abc.com"));              // leading dot
    CHECK_FALSE(DomainName::try_parse("abc.com."));              // trailing dot
    CHECK_FALSE(DomainName::try_parse("abc..com"));              // empty label
    CHECK_FALSE(DomainName::try_parse("ab c.com"));              // space
    CHECK_FALSE(DomainName::try_parse(std::string(64, 'a') + ".com"));
    CHECK_FALSE(DomainName::try_parse(std::string(250, 'a') + ".com"));
    CHECK_THROWS_AS(DomainName::parse("x"), ArgumentError);
    CHECK(DomainName::try_parse("_ldap._tcp.corp.lan"));
    CHECK(DomainName::try_parse(std::string(63, 'a') + ".com"));
  }

  TEST_CASE("class labels") {
    CHECK(ClassLabel::benign().is_benign());
    CHECK_FALSE(ClassLabel::benign().family_id());
    const auto f = ClassLabel::family("beebone");
    CHECK(f.family_id() == std::optional<std::string>("beebone"));
    CHECK(f.name() == "beebone");
    CHECK(ClassLabel::from_name("benign").is_benign());
    CHECK_THROWS_AS(ClassLabel::family(""), ArgumentError);
    CHECK_THROWS_AS(ClassLabel::family("benign"), ArgumentError);
  }
}

TEST_SUITE("generate_family") {
  TEST_CASE("fixed list of five words yields five stable domains") {
    const auto spec = fixed_list({"alpha", "bravo", "carol", "delta", "echos"}, {"com"});
    const auto a = generate_family(spec, 5, "fl");
    const auto b = generate_family(spec, 5, "fl");
    CHECK(a.size() == 5);
    CHECK(texts(a).size() == 5);
    CHECK(a == b);
    for (const auto& s : a) CHECK(s.label == ClassLabel::family("fl"));
  }

  TEST_CASE("fixed list over capacity is a capacity error") {
    const auto spec = fixed_list({"alpha", "bravo", "carol", "delta", "echos"}, {"com"});
    CHECK_THROWS_AS(generate_family(spec, 6), CapacityError);
    CHECK(generator_capacity(spec) == std::optional<std::int64_t>(5));
  }

  TEST_CASE("arith_hash, seed 1, 1000 unique names within the length range") {
    GeneratorSpec g;
    g.archetype = Archetype::arith_hash;
    g.seed = 1;
    g.length_range = {8, 16};
    const auto out = generate_family(g, 1000);
    REQUIRE(out.size() == 1000);
    CHECK(texts(out).size() == 1000);
    for (const auto& s : out) {
      const auto label = s.domain.labels().front();
      CHECK(label.size() >= 8);
      CHECK(label.size() <= 16);
    }
  }

  TEST_CASE("zero count is an argument error") {
    GeneratorSpec g;
    CHECK_THROWS_AS(generate_family(g, 0), ArgumentError);
  }

  TEST_CASE("random specs always emit valid, unique names") {
    CounterRng rng(2024);
    const Archetype kinds[] = {Archetype::arith_hash, Archetype::dictionary, Archetype::hex_counter,
                               Archetype::date_seeded};
    for (int trial = 0; trial < 40; ++trial) {
      GeneratorSpec g;
      g.archetype = kinds[rng.below(4)];
      g.seed = rng();
      const int lo = static_cast<int>(rng.between(6, 20));
      g.length_range = {lo, lo + static_cast<int>(rng.between(0, 10))};
      g.tld_pool = rng.below(2) ? std::vector<std::string>{"com", "net"} : std::vector<std::string>{"co.uk"};
      const auto n = rng.between(1, 300);
      const auto out = generate_family(g, n, "p");
      REQUIRE(static_cast<std::int64_t>(out.size()) == n);
      CHECK(static_cast<std::int64_t>(texts(out).size()) == n);
      for (const auto& s : out) CHECK(DomainName::try_parse(s.domain.text()));
    }
  }

  TEST_CASE("confusable variants overlap, independent seeds do not") {
    GeneratorSpec a;
    a.archetype = Archetype::arith_hash;
    a.seed = 99;
    auto b = a;
    b.variant = 1;
    b.shared_fraction = 0.5;
    auto c = a;
    c.seed = 100;
    const auto ta = texts(generate_family(a, 400));
    const auto tb = texts(generate_family(b, 400));
    const auto tc = texts(generate_family(c, 400));
    std::size_t shared_ab = 0, shared_ac = 0;
    for (const auto& t : tb) shared_ab += ta.count(t);
    for (const auto& t : tc) shared_ac += ta.count(t);
    CHECK(shared_ab > 50);
    CHECK(shared_ab < 400);
    CHECK(shared_ac == 0);
  }
}

TEST_SUITE("synthesize_benign") {
  TEST_CASE("seed 7, 100 valid benign samples") {
    const auto a = synthesize_benign(7, 100);
    REQUIRE(a.size() == 100);
    for (const auto& s : a) {
      CHECK(s.label.is_benign());
      CHECK(DomainName::try_parse(s.domain.text()));
    }
  }
  TEST_CASE("deterministic in seed") {
    CHECK(synthesize_benign(7, 100) == synthesize_benign(7, 100));
    CHECK(synthesize_benign(8, 100) != synthesize_benign(7, 100));
  }
  TEST_CASE("count below one") { CHECK_THROWS_AS(synthesize_benign(7, 0), ArgumentError); }
}

TEST_SUITE("ingest_feed") {
  TEST_CASE("plain lines are lowercased") {
    nxtest::TempDir dir("feed");
    write_file(dir / "f.txt", "# comment\nABC.com\n\n");
    const auto r = ingest_feed(dir / "f.txt", FeedFormat::plain_lines);
    REQUIRE(r.samples.size() == 1);
    CHECK(r.samples[0].domain.text() == "abc.com");
    CHECK(r.samples[0].origin == Origin::ingested);
  }

  TEST_CASE("csv rows carry their family label") {
    nxtest::TempDir dir("feed");
    write_file(dir / "f.csv", "label,domain\nbeebone,ns1.example.net\nbenign,mail.example.org\n");
    const auto r = ingest_feed(dir / "f.csv", FeedFormat::csv_labeled);
    REQUIRE(r.samples.size() == 2);
    CHECK(r.samples[0].label == ClassLabel::family("beebone"));
    CHECK(r.samples[0].domain.text() == "ns1.example.net");
    CHECK(r.samples[1].label.is_benign());
  }

  TEST_CASE("six malformed lines of ten reject the feed") {
    nxtest::TempDir dir("feed");
    std::string text;
    for (int i = 0; i < 4; ++i) text += "good" + std::to_string(i) + ".com\n";
    for (int i = 0; i < 6; ++i) text += "bad domain " + std::to_string(i) + "\n";
    write_file(dir / "f.txt", text);
    CHECK_THROWS_AS(ingest_feed(dir / "f.txt", FeedFormat::plain_lines), FeedRejectedError);
  }

  TEST_CASE("minority malformed lines are counted and skipped") {
    nxtest::TempDir dir("feed");
    write_file(dir / "f.txt", "a1.com\na2.com\nbad domain\na1.com\n");
    const auto r = ingest_feed(dir / "f.txt", FeedFormat::plain_lines);
    CHECK(r.samples.size() == 2);
    CHECK(r.malformed == 1);
    CHECK(r.duplicates == 1);
  }

  TEST_CASE("unreadable file") {
    CHECK_THROWS_AS(ingest_feed("/nonexistent/feed.txt", FeedFormat::plain_lines), IoError);
  }
}

TEST_SUITE("sanitize_benign") {

  std::vector<Sample> make(std::initializer_list<const char*> names) {
    std::vector<Sample> out;
    for (const char* n : names) out.push_back({DomainName::parse(n), ClassLabel::benign()});
    return out;
  }

  TEST_CASE("set difference") {
    const auto out = sanitize_benign(make({"a.com", "b.com"}), {DomainName::parse("b.com")});
    REQUIRE(out.size() == 1);
    CHECK(out[0].domain.text() == "a.com");
  }
  TEST_CASE("empty known set is the identity") {
    const auto in = make({"a.com", "b.com", "c.com"});
    CHECK(sanitize_benign(in, {}) == in);
  }
  TEST_CASE("benign equal to known is empty") {
    const auto in = make({"a.com", "b.com"});
    CHECK(sanitize_benign(in, {DomainName::parse("a.com"), DomainName::parse("b.com")}).empty());
  }
  TEST_CASE("idempotent and disjoint from the known set") {
    const auto in = nxtest::benign(300);
    std::set<DomainName> known;
    for (std::size_t i = 0; i < in.size(); i += 3) known.insert(in[i].domain);
    const auto once = sanitize_benign(in, known);
    CHECK(sanitize_benign(once, known) == once);
    for (const auto& s : once) CHECK(known.count(s.domain) == 0);
  }
}

TEST_SUITE("catalog") {
  FamilyEntry entry(const std::string& id, std::int64_t support) {
    GeneratorSpec g;
    g.seed = fnv1a(id);
    return FamilyEntry{id, g, std::nullopt, support, Group::weak};
  }

  TEST_CASE("partition at the support extremes") {
    FamilyCatalog c;
    c.add(entry("virut", 22000000));
    c.add(entry("dnsbenchmark", 5));
    const auto p = partition_by_support(c);
    CHECK(p.well == std::set<std::string>{"virut"});
    CHECK(p.weak == std::set<std::string>{"dnsbenchmark"});
  }

  TEST_CASE("exactly the threshold is weak") {
    FamilyCatalog c;
    c.add(entry("edge", 10000));
    c.add(entry("above", 10001));
    CHECK(c.at("edge").group == Group::weak);
    CHECK(c.at("above").group == Group::well);
    CHECK(partition_by_support(c).weak.count("edge") == 1);
  }

  TEST_CASE("full-scale supports split 46 / 45") {
    const auto c = full_scale_catalog();
    CHECK(c.size() == 91);
    const auto p = partition_by_support(c);
    CHECK(p.well.size() == 46);
    CHECK(p.weak.size() == 45);
  }

  TEST_CASE("empty catalog cannot be partitioned") {
    CHECK_THROWS_AS(partition_by_support(FamilyCatalog{}), ArgumentError);
  }

  TEST_CASE("partition is a disjoint cover for every threshold") {
    const auto c = full_scale_catalog();
    for (std::int64_t t : {0LL, 1LL, 5LL, 100LL, 10000LL, 1000000LL, 100000000LL}) {
      const auto p = partition_by_support(c, t);
      CHECK(p.well.size() + p.weak.size() == c.size());
      for (const auto& id : p.well) CHECK(p.weak.count(id) == 0);
    }
  }

  TEST_CASE("duplicate ids and zero support are rejected") {
    FamilyCatalog c;
    c.add(entry("a", 5));
    CHECK_THROWS_AS(c.add(entry("a", 6)), ArgumentError);
    CHECK_THROWS_AS(c.add(entry("b", 0)), ArgumentError);
  }

  TEST_CASE("file round trip") {
    nxtest::TempDir dir("catalog");
    FamilyCatalog c(100);
    auto e = entry("listy", 12);
    e.generator->archetype = Archetype::fixed_list;
    e.generator->words = {"one", "two", "three", "four"};
    e.generator->tld_pool = {"com", "net", "co.uk"};
    c.add(e);
    auto v = entry("varied", 500);
    v.generator->variant = 2;
    v.generator->shared_fraction = 0.25;
    c.add(v);
    save_catalog(c, dir / "c.ini");
    const auto back = load_catalog(dir / "c.ini", 100);
    CHECK(serialize_catalog(back) == serialize_catalog(c));
    CHECK(back.checksum() == c.checksum());
    CHECK(back.at("varied").group == Group::well);
    CHECK(back.at("listy").generator->words.size() == 4);
  }

  TEST_CASE("changing the threshold regroups") {
    FamilyCatalog c;
    c.add(entry("a", 50));
    c.set_threshold(10);
    CHECK(c.at("a").group == Group::well);
    c.set_threshold(50);
    CHECK(c.at("a").group == Group::weak);
  }
}
