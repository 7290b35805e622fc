#include <doctest.h>

#include <cmath>

#include "appsteg/embedders.hpp"
#include "appsteg/sigdetect.hpp"
#include "test_util.hpp"

using namespace appsteg;

namespace {

const SignatureTable kSigs = SignatureTable::defaults();

Bytes printable(std::size_t n, Prng& rng) {
  static constexpr char alphabet[] = "abcdefghijklmnopqrstuvwxyz ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.,;:!?'-";
  Bytes b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(alphabet[rng.uniform(sizeof(alphabet) - 1)]);
  return b;
}

struct Stego {
  AppId app;
  PixelImage image;
  Bytes message;
  Bytes password;
};

// A stego at a random feasible rate up to 0.2, RGB or RGBA cover of random size.
Stego random_stego(AppId app, Prng& rng) {
  const int w = 40 + static_cast<int>(rng.uniform(40)), h = 40 + static_cast<int>(rng.uniform(40));
  const Channels ch = rng.uniform(2) ? Channels::RGB : Channels::RGBA;
  PixelImage cover = testutil::random_image(w, h, app == AppId::DaVinci || app == AppId::StegM ? Channels::RGB : ch, rng);
  if (app == AppId::DaVinci) cover = force_alpha(cover, 255);
  const Bytes pwd = app == AppId::PocketStego ? Bytes{} : printable(1 + rng.uniform(10), rng);
  const std::size_t cap = capacity_bits(app, cover);
  const double min_rate = static_cast<double>(payload_len_bits(app, 1, pwd.size(), kSigs)) / cap;
  const double rate = min_rate + (0.2 - min_rate) * rng.uniform01();
  const RateSpec spec = message_len_for_target(app, cap, rate, pwd.size(), kSigs);
  const Bytes msg = printable(spec.message_bytes, rng);
  auto r = embed(app, cover, build_payload(app, msg, pwd, kSigs), pwd);
  return {app, std::move(r.stego), msg, pwd};
}

}  // namespace

TEST_CASE("StegM has no signature detector") {
  CHECK_THROWS_AS(detect(AppId::StegM, PixelImage(4, 4, Channels::RGB), kSigs), UnsupportedDetectorError);
}

TEST_CASE("images without carrier channels are negative, not errors") {
  const PixelImage gray(16, 16, Channels::Gray);
  for (AppId a : kDetectableApps) CHECK_FALSE(detect(a, gray, kSigs).verdict);
  CHECK_FALSE(detect(AppId::DaVinci, PixelImage(16, 16, Channels::RGB), kSigs).verdict);
}

TEST_CASE("perfect recall with exact recovery on 200 stegos per app") {
  Prng rng(404);
  for (AppId app : kDetectableApps) {
    for (int i = 0; i < 200; ++i) {
      const Stego s = random_stego(app, rng);
      const DetectionResult r = detect(app, s.image, kSigs);
      REQUIRE_MESSAGE(r.verdict, to_string(app), " #", i);
      CHECK(r.matched_app == app);
      REQUIRE(r.recovered_message.has_value());
      if (app == AppId::MobiStego) CHECK(*r.recovered_message == xor_keystream(s.message, s.password));
      else CHECK(*r.recovered_message == s.message);
      if (app == AppId::StegMaster || app == AppId::DaVinci) CHECK(r.recovered_password == s.password);
      CHECK(r.matched_at_bit.has_value());
    }
  }
}

TEST_CASE("strong detectors have no false positives on covers and other apps' stegos") {
  Prng rng(505);
  std::vector<PixelImage> others;
  for (int i = 0; i < 600; ++i) {
    const Channels ch = i % 3 == 0 ? Channels::RGBA : Channels::RGB;
    PixelImage c = testutil::random_image(32, 32, ch, rng);
    if (i % 5 == 0) c = force_alpha(c, 255);  // DaVinci-normalized cover
    others.push_back(std::move(c));
  }
  std::vector<Stego> stegos;
  for (int i = 0; i < 500; ++i) stegos.push_back(random_stego(kAllApps[i % kAllApps.size()], rng));

  std::size_t checked = 0;
  for (AppId det : {AppId::StegMaster, AppId::DaVinci, AppId::MobiStego}) {
    for (const auto& img : others) {
      CHECK_FALSE(detect(det, img, kSigs).verdict);
      ++checked;
    }
    for (const auto& s : stegos) {
      if (s.app == det) continue;
      const DetectionResult r = detect(det, s.image, kSigs);
      CHECK_FALSE(r.verdict);
      CHECK_FALSE(r.recovered_message.has_value());
      ++checked;
    }
  }
  CHECK(checked >= 3000);
}

TEST_CASE("PocketStego false-positive rate follows the analytic terminator bound") {
  // 59 x 24 pixels -> 177 blue-LSB bytes -> P(hit) = 1 - (255/256)^177 ~ 0.499.
  Prng rng(606);
  const int n = 2000;
  int flagged = 0;
  for (int i = 0; i < n; ++i) flagged += detect(AppId::PocketStego, testutil::random_image(59, 24, Channels::RGB, rng), kSigs).verdict;
  const double expect = random_terminator_hit_probability(177);
  CHECK(expect == doctest::Approx(1.0 - std::pow(255.0 / 256.0, 177)));
  CHECK(std::abs(flagged / double(n) - expect) < 0.035);
}

TEST_CASE("printable-only filter rejects random hits") {
  Prng rng(707);
  int flagged = 0;
  for (int i = 0; i < 200; ++i)
    flagged += detect(AppId::PocketStego, testutil::random_image(64, 64, Channels::RGB, rng), kSigs,
                      DetectOptions{true})
                   .verdict;
  CHECK(flagged < 10);
  const Stego s = random_stego(AppId::PocketStego, rng);
  CHECK(detect(AppId::PocketStego, s.image, kSigs, DetectOptions{true}).verdict);
}

TEST_CASE("scan_all runs the four detectors in fixed order") {
  Prng rng(808);
  const Stego s = random_stego(AppId::StegMaster, rng);
  const auto all = scan_all(s.image, kSigs);
  REQUIRE(all.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(all[i].matched_app == kDetectableApps[i]);
  CHECK(all[0].verdict);
  CHECK_FALSE(all[1].verdict);
  CHECK_FALSE(all[2].verdict);
  // Deterministic.
  const auto again = scan_all(s.image, kSigs);
  for (std::size_t i = 0; i < 4; ++i) CHECK(again[i].verdict == all[i].verdict);
}

TEST_CASE("custom signatures are honoured") {
  SignatureTable sigs = kSigs;
  sigs.mobistego_start = to_bytes("ZZZ");
  sigs.mobistego_end = to_bytes("QQQ");
  Prng rng(909);
  const PixelImage cover = testutil::random_image(32, 32, Channels::RGB, rng);
  const Bytes pwd = to_bytes("k");
  const auto r = embed(AppId::MobiStego, cover, build_payload(AppId::MobiStego, to_bytes("msg"), pwd, sigs), pwd);
  CHECK(detect(AppId::MobiStego, r.stego, sigs).verdict);
  CHECK_FALSE(detect(AppId::MobiStego, r.stego, kSigs).verdict);
}
