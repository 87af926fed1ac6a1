#include <doctest.h>

#include <string>
#include <vector>

#include "ref_sha256.hpp"
#include "tz/crypto.hpp"
#include "tz/errors.hpp"
#include "tz/local_access.hpp"

using namespace tz;

namespace {
SubscriberProfile profile(const std::string& id, const std::string& cred, std::int64_t v = 1) {
  return {id, credential_digest(cred), 0, v, 0};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::WrongState;
}
}  // namespace

TEST_CASE("credential digest is SHA-256 of the credential") {
  const std::string c = "k1";
  CHECK(credential_digest(c) ==
        ref::sha256(std::span(reinterpret_cast<const std::uint8_t*>(c.data()), c.size())));
  CHECK(to_hex(sha256({})) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("activation follows the lifecycle table") {
  LocalAccess laa;
  CHECK(laa.activation() == LaaActivation::Inactive);
  CHECK(laa.set_activation(TzState::D) == LaaActivation::Activated);
  CHECK(laa.set_activation(TzState::L) == LaaActivation::Active);
  CHECK(laa.set_activation(TzState::W) == LaaActivation::Inactive);
  CHECK(laa.set_activation(TzState::R) == LaaActivation::Deactivated);
  CHECK(laa.set_activation(TzState::C) == LaaActivation::Inactive);
}

TEST_CASE("local authentication") {
  std::vector<std::string> seen;
  LocalAccess laa({profile("u1", "k1")},
                  [&](AuditKind, const UeId& ue, std::string_view o) {
                    seen.push_back(ue + ":" + std::string(o));
                  });
  CHECK(code_of([&] { laa.local_authenticate("u1", "k1"); }) == ErrorCode::NotActive);
  laa.set_activation(TzState::L);
  CHECK(laa.local_authenticate("u1", "k1") == Trust::Trusted);
  CHECK(laa.local_authenticate("nobody", "k1") == Trust::Untrusted);
  CHECK(laa.local_authenticate("u1", "wrong") == Trust::Untrusted);
  CHECK(seen == std::vector<std::string>{"u1:trusted", "nobody:untrusted", "u1:untrusted"});
}

TEST_CASE("AS key derivation") {
  LocalAccess laa({profile("u1", "k1")});
  CHECK(code_of([&] { laa.derive_as_key("u1"); }) == ErrorCode::NotActive);
  laa.set_activation(TzState::D);
  auto t0 = laa.derive_as_key("u1");
  auto t1 = laa.derive_as_key("u1");
  CHECK(t0.counter == 0);
  CHECK(t1.counter == 1);
  CHECK(t0.token != t1.token);
  CHECK(t0.token == ref::kdf(credential_digest("k1"), 0));
  CHECK(t1.token == ref::kdf(credential_digest("k1"), 1));
  CHECK(laa.find("u1")->key_counter == 2);
  static_assert(AsKeyToken::scope == KeyScope::AS);
  CHECK(code_of([&] { laa.derive_as_key("u1", KeyScope::NAS); }) == ErrorCode::ScopeViolation);
  CHECK(code_of([&] { laa.derive_as_key("ghost"); }) == ErrorCode::UnknownSubscriber);
  CHECK(laa.cached_token_count() == 1);
  laa.set_activation(TzState::R);
  CHECK(laa.cached_token_count() == 0);
}

TEST_CASE("profile sync") {
  LocalAccess laa({profile("u1", "k1", 3)});
  laa.set_activation(TzState::C);
  std::vector<SubscriberProfile> snap{profile("u1", "k1b", 5)};
  auto r = laa.sync_profiles(snap, 100);
  CHECK(r.applied == 1);
  CHECK(r.skipped == 0);
  CHECK(laa.find("u1")->sync_version == 5);
  CHECK(laa.find("u1")->credential_digest == credential_digest("k1b"));
  CHECK(laa.last_sync_at() == 100);

  r = laa.sync_profiles(snap, 200);
  CHECK(r.applied == 0);
  CHECK(r.skipped == 1);

  laa.set_activation(TzState::L);
  CHECK(code_of([&] { laa.sync_profiles(snap, 300); }) == ErrorCode::NoConnectivity);
  laa.set_activation(TzState::D);
  CHECK(code_of([&] { laa.sync_profiles(snap, 300); }) == ErrorCode::NoConnectivity);
}

TEST_CASE("sync keeps the higher key counter") {
  LocalAccess laa({profile("u1", "k1", 1)});
  laa.set_activation(TzState::L);
  laa.derive_as_key("u1");
  laa.derive_as_key("u1");
  laa.set_activation(TzState::W);
  std::vector<SubscriberProfile> snap{profile("u1", "k1", 2)};
  laa.sync_profiles(snap, 0);
  CHECK(laa.find("u1")->key_counter == 2);
  // a new subscriber is added
  std::vector<SubscriberProfile> more{profile("u9", "k9", 1)};
  CHECK(laa.sync_profiles(more, 0).applied == 1);
  CHECK(laa.profile_count() == 2);
}
