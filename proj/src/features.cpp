#include "nxbench/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "nxbench/error.hpp"
#include "nxbench/rng.hpp"
#include "nxbench/text.hpp"

namespace nxbench {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    // structural
    "length", "label_count", "mean_label_length", "max_label_length", "digit_ratio",
    "hyphen_count", "digit_only_label",
    // linguistic
    "vowel_ratio", "consonant_ratio", "hex_ratio", "distinct_char_ratio",
    "longest_consonant_run", "longest_digit_run", "repeated_char_ratio",
    // statistical
    "entropy", "normalized_entropy", "distinct_bigram_ratio", "distinct_trigram_ratio",
    "index_of_coincidence", "mean_bigram_rank", "chi_square_distance"};

constexpr std::string_view kSuffixes[] = {
    "co.uk", "org.uk", "ac.uk", "gov.uk", "com.au", "net.au", "org.au", "co.jp", "ne.jp",
    "com.br", "com.cn", "net.cn", "org.cn", "co.in", "co.za", "com.tr", "com.mx", "co.kr",
    "com.ru", "com.ua", "co.nz", "com.ar", "com.pl", "com.tw", "com.hk", "com.sg",
    "com", "net", "org", "info", "biz", "edu", "gov", "mil", "int", "ru", "de", "cn", "uk",
    "nl", "eu", "io", "fr", "it", "pl", "es", "jp", "br", "in", "us", "ca", "au", "ch",
    "at", "be", "se", "no", "dk", "fi", "cz", "tk", "top", "xyz", "cc", "tv", "me", "co",
    "su", "ws", "kz", "ua", "kr", "tw", "hk", "sg", "nz", "ar", "mx", "tr", "za", "ir",
    "vn", "id", "my", "th", "ph", "gr", "pt", "ro", "hu", "sk", "bg", "lt", "lv", "ee",
    "local", "lan", "localdomain", "home", "corp", "online", "site", "club", "pw", "mobi",
    "name", "pro", "asia", "xxx", "space", "website", "tech", "store", "ddns", "onion"};

constexpr bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}
constexpr bool is_letter(char c) { return c >= 'a' && c <= 'z'; }
constexpr bool is_digit(char c) { return c >= '0' && c <= '9'; }
constexpr bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f'); }

std::string strip_dots(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (c != '.') out += c;
  return out;
}

double shannon_entropy(const std::array<int, kAlphabetSize>& counts, int total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (int n : counts) {
    if (n == 0) continue;
    const double p = static_cast<double>(n) / total;
    h -= p * std::log2(p);
  }
  return h;
}

double distinct_ngram_ratio(const std::string& s, std::size_t n) {
  if (s.size() < n) return 0.0;
  std::vector<std::string_view> grams;
  for (std::size_t i = 0; i + n <= s.size(); ++i) grams.emplace_back(s.data() + i, n);
  const double total = static_cast<double>(grams.size());
  std::sort(grams.begin(), grams.end());
  const auto distinct = std::unique(grams.begin(), grams.end()) - grams.begin();
  return static_cast<double>(distinct) / total;
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() { return kNames; }

std::uint64_t feature_registry_checksum() {
  std::uint64_t h = fnv1a("nxbench-features-v1");
  for (auto name : kNames) h = fnv1a(name, fnv1a("|", h));
  h = fnv1a("abcdefghijklmnopqrstuvwxyz0123456789-.", h);
  h = mix64(h, kNgramBuckets);
  return h;
}

int alphabet_index(char c) noexcept {
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c >= '0' && c <= '9') return 26 + (c - '0');
  if (c == '.') return 37;
  return 36;
}

std::string_view registrable_part(std::string_view domain) {
  std::size_t best = 0;
  for (auto suffix : kSuffixes) {
    if (suffix.size() + 1 >= domain.size() || suffix.size() <= best) continue;
    if (domain.ends_with(suffix) && domain[domain.size() - suffix.size() - 1] == '.') {
      best = suffix.size();
    }
  }
  if (best > 0) return domain.substr(0, domain.size() - best - 1);
  const auto dot = domain.rfind('.');
  if (dot == std::string_view::npos) return domain;
  return domain.substr(0, dot);
}

BenignReference::BenignReference()
    : char_freq_(CharDistribution::Constant(1.0 / kAlphabetSize)),
      ranks_(kAlphabetSize * kAlphabetSize, 0) {}

int BenignReference::bigram_rank(char a, char b) const noexcept {
  const int r = ranks_[alphabet_index(a) * kAlphabetSize + alphabet_index(b)];
  return r == 0 ? table_size_ + 1 : r;
}

BenignReference fit_reference(std::span<const Sample> benign_train) {
  std::array<double, kAlphabetSize> char_counts{};
  std::vector<std::int64_t> bigram_counts(kAlphabetSize * kAlphabetSize, 0);
  std::size_t used = 0;
  for (const auto& s : benign_train) {
    if (!s.label.is_benign()) continue;
    ++used;
    for (char c : s.domain.text()) char_counts[alphabet_index(c)] += 1.0;
    const auto chars = strip_dots(registrable_part(s.domain.text()));
    for (std::size_t i = 0; i + 1 < chars.size(); ++i) {
      ++bigram_counts[alphabet_index(chars[i]) * kAlphabetSize + alphabet_index(chars[i + 1])];
    }
  }
  if (used < kMinReferenceSamples) {
    throw FitError("benign reference needs at least 100 benign samples, got " +
                   std::to_string(used));
  }
  BenignReference ref;
  const double total = std::accumulate(char_counts.begin(), char_counts.end(), 0.0);
  for (int i = 0; i < kAlphabetSize; ++i) ref.char_freq_[i] = char_counts[i] / total;

  std::vector<int> order;
  for (int i = 0; i < kAlphabetSize * kAlphabetSize; ++i)
    if (bigram_counts[i] > 0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return bigram_counts[a] > bigram_counts[b]; });
  for (std::size_t r = 0; r < order.size(); ++r) ref.ranks_[order[r]] = static_cast<int>(r) + 1;
  ref.table_size_ = static_cast<int>(order.size());
  return ref;
}

BenignReference reference_from_parts(const CharDistribution& char_freq, std::vector<int> ranks) {
  if (ranks.size() != static_cast<std::size_t>(kAlphabetSize * kAlphabetSize)) {
    throw ArgumentError("bigram rank table has wrong size");
  }
  BenignReference ref;
  ref.char_freq_ = char_freq;
  ref.table_size_ = static_cast<int>(std::count_if(ranks.begin(), ranks.end(), [](int r) { return r > 0; }));
  ref.ranks_ = std::move(ranks);
  return ref;
}

FeatureVector extract_features(const DomainName& domain, const BenignReference& ref) {
  const std::string_view part = registrable_part(domain.text());
  const std::string chars = strip_dots(part);
  const double n = static_cast<double>(chars.size());

  // structural
  int labels = 1, max_label = 0, label_len = 0, hyphens = 0, digits = 0;
  bool digit_only_label = false, label_all_digits = true;
  auto close_label = [&] {
    max_label = std::max(max_label, label_len);
    if (label_len > 0 && label_all_digits) digit_only_label = true;
    label_len = 0;
    label_all_digits = true;
  };
  for (char c : part) {
    if (c == '.') {
      ++labels;
      close_label();
      continue;
    }
    ++label_len;
    if (!is_digit(c)) label_all_digits = false;
    if (is_digit(c)) ++digits;
    if (c == '-') ++hyphens;
  }
  close_label();

  // linguistic
  int vowels = 0, consonants = 0, hexes = 0;
  int run_cons = 0, best_cons = 0, run_dig = 0, best_dig = 0;
  std::array<int, kAlphabetSize> counts{};
  for (char c : chars) {
    ++counts[alphabet_index(c)];
    if (is_vowel(c)) ++vowels;
    if (is_letter(c) && !is_vowel(c)) {
      ++consonants;
      best_cons = std::max(best_cons, ++run_cons);
    } else {
      run_cons = 0;
    }
    if (is_digit(c)) {
      best_dig = std::max(best_dig, ++run_dig);
    } else {
      run_dig = 0;
    }
    if (is_hex(c)) ++hexes;
  }
  int distinct = 0, repeated = 0;
  for (int k : counts) {
    if (k > 0) ++distinct;
    if (k > 1) repeated += k;
  }

  // statistical
  const int total = static_cast<int>(chars.size());
  const double entropy = shannon_entropy(counts, total);
  const double normalized = distinct > 1 ? entropy / std::log2(static_cast<double>(distinct)) : 0.0;
  double coincidence = 0.0;
  if (total > 1) {
    for (int k : counts) coincidence += static_cast<double>(k) * (k - 1);
    coincidence /= static_cast<double>(total) * (total - 1);
  }
  double mean_rank = 0.0;
  if (chars.size() > 1) {
    for (std::size_t i = 0; i + 1 < chars.size(); ++i) mean_rank += ref.bigram_rank(chars[i], chars[i + 1]);
    mean_rank /= static_cast<double>(chars.size() - 1);
  }
  // Symmetric chi-square distance over every bin except '.', which never
  // occurs in `chars`; the reference is renormalized accordingly.
  double chi = 0.0;
  const double ref_mass = 1.0 - ref.char_freq()[alphabet_index('.')];
  for (int i = 0; i < kAlphabetSize - 1; ++i) {
    const double p = n > 0 ? counts[i] / n : 0.0;
    const double q = ref_mass > 0 ? ref.char_freq()[i] / ref_mass : 0.0;
    if (p + q > 0) chi += (p - q) * (p - q) / (p + q);
  }
  chi *= 0.5;

  FeatureVector f;
  f << static_cast<double>(part.size()), labels, static_cast<double>(part.size() - (labels - 1)) / labels,
      max_label, n > 0 ? digits / n : 0.0, hyphens, digit_only_label ? 1.0 : 0.0,
      n > 0 ? vowels / n : 0.0, n > 0 ? consonants / n : 0.0, n > 0 ? hexes / n : 0.0,
      n > 0 ? distinct / n : 0.0, best_cons, best_dig, n > 0 ? repeated / n : 0.0,
      entropy, normalized, distinct_ngram_ratio(chars, 2), distinct_ngram_ratio(chars, 3),
      coincidence, mean_rank, std::clamp(chi, 0.0, 1.0);
  return f;
}

NgramBuckets encode_ngrams(const DomainName& domain) {
  const std::string_view part = registrable_part(domain.text());
  NgramBuckets buckets = NgramBuckets::Zero();
  for (std::size_t i = 0; i + 1 < part.size(); ++i) {
    const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<unsigned char>(part[i])) << 8) |
                              static_cast<unsigned char>(part[i + 1]);
    buckets[static_cast<Eigen::Index>(mix64(key) % kNgramBuckets)] += 1.0;
  }
  return buckets;
}

Eigen::MatrixXd feature_matrix(std::span<const DomainName> domains, const BenignReference& ref) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(domains.size()), kFeatureCount);
  for (std::size_t i = 0; i < domains.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = extract_features(domains[i], ref).transpose();
  }
  return X;
}

Eigen::MatrixXd feature_matrix(std::span<const Sample> samples, const BenignReference& ref) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(samples.size()), kFeatureCount);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = extract_features(samples[i].domain, ref).transpose();
  }
  return X;
}

Eigen::MatrixXd neural_matrix(std::span<const DomainName> domains, const BenignReference& ref) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(domains.size()), kNeuralInputDim);
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    X.row(r).head<kNgramBuckets>() = encode_ngrams(domains[i]).transpose();
    X.row(r).tail<kFeatureCount>() = extract_features(domains[i], ref).transpose();
  }
  return X;
}

Eigen::MatrixXd neural_matrix(std::span<const Sample> samples, const BenignReference& ref) {
  std::vector<DomainName> domains;
  domains.reserve(samples.size());
  for (const auto& s : samples) domains.push_back(s.domain);
  return neural_matrix(std::span<const DomainName>(domains), ref);
}

void write_feature_csv(const std::filesystem::path& path, std::span<const Sample> samples,
                       const BenignReference& ref) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "domain,label";
  for (int i = 1; i <= kFeatureCount; ++i) out << (i < 10 ? ",f0" : ",f") << i;
  out << '\n';
  for (const auto& s : samples) {
    const auto f = extract_features(s.domain, ref);
    out << s.domain.text() << ',' << s.label.name();
    for (int i = 0; i < kFeatureCount; ++i) out << ',' << format_shortest(f[i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace nxbench
