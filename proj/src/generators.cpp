#include "nxbench/generators.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>
#include <unordered_set>

#include "nxbench/error.hpp"
#include "nxbench/rng.hpp"

namespace nxbench {

namespace {

constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
constexpr std::string_view kConsonants = "bcdfghjklmnpqrstvwxz";
constexpr std::string_view kVowels = "aeiouy";
constexpr std::string_view kHex = "0123456789abcdef";
constexpr std::string_view kAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";

char pick(std::string_view alphabet, CounterRng& rng) { return alphabet[rng.below(alphabet.size())]; }

template <typename T>
const T& pick(const std::vector<T>& items, CounterRng& rng) {
  return items[rng.below(items.size())];
}

std::string with_tld(std::string label, const GeneratorSpec& spec, CounterRng& rng) {
  return std::move(label) + "." + pick(spec.tld_pool, rng);
}

std::string make_arith_hash(const GeneratorSpec& spec, CounterRng& rng) {
  const auto len = rng.between(spec.length_range.first, spec.length_range.second);
  std::string label;
  for (std::int64_t i = 0; i < len; ++i) label += pick(kLetters, rng);
  return with_tld(std::move(label), spec, rng);
}

std::string make_hex_counter(const GeneratorSpec& spec, CounterRng& rng) {
  const auto len = rng.between(spec.length_range.first, spec.length_range.second);
  std::string label;
  for (std::int64_t i = 0; i < len; ++i) label += pick(kHex, rng);
  return with_tld(std::move(label), spec, rng);
}

std::string make_dictionary(const GeneratorSpec& spec, CounterRng& rng) {
  const auto& vocab = spec.words.empty() ? default_dictionary_words() : spec.words;
  const auto [lo, hi] = spec.length_range;
  std::string label;
  for (int attempt = 0; attempt < 8; ++attempt) {
    label.clear();
    while (static_cast<int>(label.size()) < lo) label += pick(vocab, rng);
    if (static_cast<int>(label.size()) <= hi) break;
  }
  if (static_cast<int>(label.size()) > hi) label.resize(hi);
  if (label.back() == '-') label.back() = 'a';
  return with_tld(std::move(label), spec, rng);
}

/// Alternating consonant/vowel names whose length and letter stream are
/// fixed per "day" (16 consecutive indices), mimicking date-keyed DGAs.
std::string make_date_seeded(const GeneratorSpec& spec, std::uint64_t stream,
                             std::uint64_t index) {
  const std::uint64_t day = index / 16;
  CounterRng day_rng(mix64(stream, day));
  const auto len = day_rng.between(spec.length_range.first, spec.length_range.second);
  std::uint64_t state = mix64(day_rng(), index % 16);
  std::string label;
  for (std::int64_t i = 0; i < len; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const auto& alphabet = (i % 2 == 0) ? kConsonants : kVowels;
    label += alphabet[(state >> 33) % alphabet.size()];
  }
  CounterRng tld_rng(mix64(stream, index), 1);
  return with_tld(std::move(label), spec, tld_rng);
}

std::uint64_t stream_for(const GeneratorSpec& spec, std::uint64_t index) {
  const std::uint64_t shared = mix64(spec.seed, 0);
  if (spec.variant == 0) return shared;
  CounterRng selector(mix64(mix64(spec.seed, spec.variant), 0x5e1ec7ULL), index);
  if (selector.uniform() < spec.shared_fraction) return shared;
  return mix64(spec.seed, spec.variant);
}

std::string make_candidate(const GeneratorSpec& spec, std::uint64_t index) {
  const std::uint64_t stream = stream_for(spec, index);
  CounterRng rng(mix64(stream, index));
  switch (spec.archetype) {
    case Archetype::arith_hash:
      return make_arith_hash(spec, rng);
    case Archetype::hex_counter:
      return make_hex_counter(spec, rng);
    case Archetype::dictionary:
      return make_dictionary(spec, rng);
    case Archetype::date_seeded:
      return make_date_seeded(spec, stream, index);
    case Archetype::fixed_list:
      break;
  }
  throw ArgumentError("fixed_list candidates are enumerated, not sampled");
}

std::vector<std::string> fixed_list_inventory(const GeneratorSpec& spec) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& word : spec.words) {
    for (const auto& tld : spec.tld_pool) {
      auto name = DomainName::try_parse(word + "." + tld);
      if (name && seen.insert(name->text()).second) out.push_back(name->text());
    }
  }
  return out;
}

}  // namespace

std::optional<std::int64_t> generator_capacity(const GeneratorSpec& spec) {
  if (spec.archetype == Archetype::fixed_list) {
    return static_cast<std::int64_t>(fixed_list_inventory(spec).size());
  }
  double alphabet = 0;
  switch (spec.archetype) {
    case Archetype::arith_hash:
      alphabet = 26;
      break;
    case Archetype::hex_counter:
      alphabet = 16;
      break;
    default:
      return std::nullopt;
  }
  double total = 0;
  for (int len = spec.length_range.first; len <= spec.length_range.second; ++len) {
    total += std::pow(alphabet, len);
  }
  total *= static_cast<double>(spec.tld_pool.size());
  if (total > 1e15) return std::nullopt;
  return static_cast<std::int64_t>(total);
}

std::vector<Sample> generate_family(const GeneratorSpec& spec, std::int64_t count,
                                    const std::string& family_id) {
  if (count < 1) throw ArgumentError("count must be >= 1");
  spec.validate();
  const auto label = ClassLabel::family(family_id);
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(count));

  if (spec.archetype == Archetype::fixed_list) {
    auto inventory = fixed_list_inventory(spec);
    if (count > static_cast<std::int64_t>(inventory.size())) {
      throw CapacityError("fixed_list family '" + family_id + "' holds " +
                          std::to_string(inventory.size()) + " domains, " +
                          std::to_string(count) + " requested");
    }
    CounterRng rng(derive_key(mix64(spec.seed, spec.variant), "fixed_list"));
    shuffle(inventory, rng);
    for (std::int64_t i = 0; i < count; ++i) {
      out.push_back(Sample{DomainName::parse(inventory[i]), label, Origin::synthetic});
    }
    return out;
  }

  if (auto cap = generator_capacity(spec); cap && count > *cap) {
    throw CapacityError("family '" + family_id + "' output space holds " +
                        std::to_string(*cap) + " domains, " + std::to_string(count) +
                        " requested");
  }
  std::unordered_set<std::string> seen;
  const std::uint64_t max_attempts = static_cast<std::uint64_t>(count) * 50 + 1000;
  for (std::uint64_t index = 0; static_cast<std::int64_t>(out.size()) < count; ++index) {
    if (index >= max_attempts) {
      throw CapacityError("family '" + family_id + "' produced only " +
                          std::to_string(out.size()) + " unique domains of " +
                          std::to_string(count) + " requested");
    }
    auto name = DomainName::try_parse(make_candidate(spec, index));
    if (!name || !seen.insert(name->text()).second) continue;
    out.push_back(Sample{std::move(*name), label, Origin::synthetic});
  }
  return out;
}

namespace {

const std::vector<std::string> kBenignTlds = {"com", "com", "com", "net", "org", "de",
                                              "co.uk", "info", "io", "eu", "nl"};
const std::vector<std::string> kCorpNames = {"corp", "intra", "office", "campus", "lab",
                                             "hq", "ad", "internal", "home", "net"};
const std::vector<std::string> kHostWords = {"printer", "nas", "router", "desktop", "laptop",
                                             "fileserver", "build", "mail", "proxy", "scanner",
                                             "camera", "tv", "phone", "backup", "git"};
const std::vector<std::string> kVendors = {"adobe", "hp", "canon", "epson", "logitech",
                                           "nvidia", "realtek", "intel", "dell", "lenovo",
                                           "avast", "mozilla", "spotify", "steam", "zoom"};

std::string mutate_typo(std::string word, CounterRng& rng) {
  const int edits = 1 + static_cast<int>(rng.below(2));
  for (int e = 0; e < edits && word.size() > 2; ++e) {
    const std::size_t pos = rng.below(word.size());
    switch (rng.below(5)) {
      case 0:  // insertion
        word.insert(word.begin() + static_cast<long>(pos), pick(kLetters, rng));
        break;
      case 1:  // deletion
        word.erase(pos, 1);
        break;
      case 2:  // substitution
        word[pos] = pick(kLetters, rng);
        break;
      case 3:  // transposition
        if (pos + 1 < word.size()) std::swap(word[pos], word[pos + 1]);
        break;
      default:  // doubled key
        word.insert(word.begin() + static_cast<long>(pos), word[pos]);
        break;
    }
  }
  return word;
}

std::string benign_typo(CounterRng& rng) {
  const auto& vocab = benign_vocabulary();
  std::string word = pick(vocab, rng);
  if (rng.below(3) == 0) word += pick(vocab, rng);
  std::string prefix = rng.below(4) == 0 ? "www." : "";
  return prefix + mutate_typo(std::move(word), rng) + "." + pick(kBenignTlds, rng);
}

std::string benign_software(CounterRng& rng) {
  const std::string corp = pick(kCorpNames, rng) + (rng.below(2) ? std::string() : pick(benign_vocabulary(), rng));
  const std::string tld = pick(kBenignTlds, rng);
  switch (rng.below(7)) {
    case 0:
      return "wpad." + corp + "." + tld;
    case 1:
      return "_ldap._tcp.dc._msdcs." + corp + "." + tld;
    case 2:
      return pick(kHostWords, rng) + std::to_string(rng.below(40)) + "." + corp + ".lan";
    case 3:
      return "isatap." + corp + "." + tld;
    case 4:
      return "update." + pick(kVendors, rng) + "-" + pick(benign_vocabulary(), rng) + "." + tld;
    case 5:
      return pick(kHostWords, rng) + "." + pick(benign_vocabulary(), rng) + ".localdomain";
    default:
      return "api." + pick(kVendors, rng) + pick(benign_vocabulary(), rng) + "." + tld;
  }
}

std::string benign_composite(CounterRng& rng) {
  const auto& vocab = benign_vocabulary();
  std::string label = pick(vocab, rng);
  label += (rng.below(3) == 0 ? "-" : "");
  label += pick(vocab, rng);
  if (rng.below(5) == 0) label += std::to_string(rng.below(100));
  return label + "." + pick(kBenignTlds, rng);
}

/// Browser hijack probes: a single random label of 7 to 15 letters.
std::string benign_probe(CounterRng& rng) {
  const auto len = rng.between(7, 15);
  std::string label;
  for (std::int64_t i = 0; i < len; ++i) label += pick(kLetters, rng);
  return label;
}

/// Antivirus signature lookups carried in DNS labels.
std::string benign_av_lookup(CounterRng& rng) {
  std::string h1, h2;
  for (int i = 0; i < 16; ++i) h1 += pick(kHex, rng);
  for (int i = 0; i < 8; ++i) h2 += pick(kAlnum, rng);
  return h1 + "." + h2 + ".sigs.avcloud.net";
}

}  // namespace

std::vector<Sample> synthesize_benign(std::uint64_t seed, std::int64_t count) {
  if (count < 1) throw ArgumentError("count must be >= 1");
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(count));
  std::unordered_set<std::string> seen;
  const std::uint64_t root = derive_key(seed, "benign");
  const std::uint64_t max_attempts = static_cast<std::uint64_t>(count) * 50 + 1000;
  for (std::uint64_t index = 0; static_cast<std::int64_t>(out.size()) < count; ++index) {
    if (index >= max_attempts) throw CapacityError("benign synthesis saturated");
    CounterRng rng(mix64(root, index));
    const auto roll = rng.below(100);
    std::string text;
    if (roll < 50) {
      text = benign_typo(rng);
    } else if (roll < 75) {
      text = benign_software(rng);
    } else if (roll < 92) {
      text = benign_composite(rng);
    } else if (roll < 96) {
      text = benign_probe(rng);
    } else {
      text = benign_av_lookup(rng);
    }
    auto name = DomainName::try_parse(text);
    if (!name || !seen.insert(name->text()).second) continue;
    out.push_back(Sample{std::move(*name), ClassLabel::benign(), Origin::synthetic});
  }
  return out;
}

const std::vector<std::string>& default_dictionary_words() {
  static const std::vector<std::string> words = {
      "able",   "acid",   "aged",   "also",   "area",   "army",   "away",   "baby",
      "back",   "ball",   "band",   "bank",   "base",   "bath",   "bear",   "beat",
      "been",   "beer",   "bell",   "belt",   "best",   "bill",   "bird",   "blow",
      "blue",   "boat",   "body",   "bomb",   "bond",   "bone",   "book",   "boom",
      "born",   "boss",   "both",   "bowl",   "bulk",   "burn",   "bush",   "busy",
      "call",   "calm",   "came",   "camp",   "card",   "care",   "case",   "cash",
      "cast",   "cell",   "chat",   "chip",   "city",   "club",   "coal",   "coat",
      "code",   "cold",   "come",   "cook",   "cool",   "cope",   "copy",   "core",
      "cost",   "crew",   "crop",   "dark",   "data",   "date",   "dawn",   "days",
      "dead",   "deal",   "dean",   "dear",   "debt",   "deep",   "deny",   "desk",
      "dial",   "diet",   "disc",   "disk",   "does",   "done",   "door",   "dose",
      "down",   "draw",   "drew",   "drop",   "drug",   "dual",   "duke",   "dust",
      "duty",   "each",   "earn",   "ease",   "east",   "easy",   "edge",   "else",
      "even",   "ever",   "evil",   "exit",   "face",   "fact",   "fail",   "fair",
      "fall",   "farm",   "fast",   "fate",   "fear",   "feed",   "feel",   "feet",
      "fell",   "felt",   "file",   "fill",   "film",   "find",   "fine",   "fire",
      "firm",   "fish",   "five",   "flat",   "flow",   "food",   "foot",   "ford",
      "form",   "fort",   "four",   "free",   "from",   "fuel",   "full",   "fund",
  };
  return words;
}

const std::vector<std::string>& benign_vocabulary() {
  static const std::vector<std::string> words = {
      "google",    "facebook",  "youtube",   "amazon",    "wikipedia", "twitter",
      "instagram", "linkedin",  "microsoft", "apple",     "netflix",   "yahoo",
      "reddit",    "ebay",      "paypal",    "github",    "stackoverflow", "office",
      "outlook",   "dropbox",   "spotify",   "adobe",     "wordpress", "bing",
      "weather",   "news",      "sport",     "shop",      "travel",    "music",
      "mail",      "cloud",     "photo",     "video",     "games",     "market",
      "bank",      "student",   "university", "library",  "research",  "science",
      "campus",    "portal",    "login",     "account",   "support",   "service",
      "online",    "media",     "health",    "clinic",    "hospital",  "doctor",
      "garden",    "kitchen",   "house",     "home",      "family",    "travel",
      "flight",    "hotel",     "ticket",    "cinema",    "theatre",   "museum",
      "football",  "tennis",    "running",   "cycling",   "fitness",   "recipe",
      "coffee",    "pizza",     "burger",    "bakery",    "market",    "fashion",
      "shoes",     "jeans",     "watch",     "phone",     "mobile",    "laptop",
      "camera",    "printer",   "software",  "update",    "download",  "stream",
      "radio",     "podcast",   "forum",     "blog",      "wiki",      "docs",
      "calendar",  "contacts",  "maps",      "translate", "search",    "images",
      "aachen",    "berlin",    "munich",    "hamburg",   "cologne",   "london",
      "paris",     "vienna",    "zurich",    "amsterdam", "europe",    "germany",
      "river", "mountain", "lake", "ocean", "beach", "sunset", "island", "valley", "meadow", "forest", "village", "castle", "bridge", "tower", "station", "harbor", "garage", "studio", "office", "school", "teacher", "kids", "toys", "puzzle", "travel", "boat", "camping", "hiking", "climbing", "skiing", "surfing", "yoga", "dance", "theater", "concert", "guitar", "piano", "violin", "singer", "artist", "gallery", "design", "print", "paper", "books", "comics", "novel", "poetry", "writer", "story", "history", "nature", "animal", "garden", "flower", "tree", "plant", "seeds", "farm", "fresh", "organic", "kitchen", "dinner", "lunch", "breakfast", "salad", "soup", "bread", "cheese", "wine", "beer", "juice", "water", "candy", "chocolate", "cookie", "cake", "sugar", "honey", "apple", "orange", "banana", "berry", "lemon", "pepper", "spice", "market", "grocery", "store", "outlet", "deals", "coupon", "sale", "auction", "rental", "apartment", "estate", "realty", "insurance", "finance", "credit", "loan", "invest", "money", "wallet", "crypto", "trading", "stock", "budget", "career", "jobs", "hiring", "resume", "office", "meeting", "team", "project", "planner", "tracker", "helper", "assistant", "connect", "social", "friends", "dating", "wedding", "baby", "parent", "pets", "dogs", "cats", "horse", "bird", "fishing", "hunting", "outdoor", "sports", "soccer", "hockey", "golf", "baseball", "racing", "motor", "car", "bike", "auto", "repair", "parts", "tools", "build", "craft", "maker", "home", "living", "room", "bed", "bath", "light", "lamp", "window", "door", "floor", "paint", "color", "silver", "golden", "green", "blue", "red", "black", "white", 
  };
  return words;
}

}  // namespace nxbench
