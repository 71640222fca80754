#include <random>
#include <set>

#include "doctest.h"
#include "live_server.hpp"
#include "newsroom/client/reporter.hpp"
#include "process.hpp"
#include "stub_server.hpp"
#include "testkit.hpp"

using namespace newsroom;
using namespace newsroom::client;
using K = ClientError::Kind;
using testkit::LiveServer;
namespace fs = std::filesystem;

namespace {

K kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ClientError& e) {
    return e.kind();
  }
  FAIL("no ClientError thrown");
  return K::server;
}

MessageFields draft_fields(std::string title = "Storm hits coast") {
  return {std::move(title), "Waves over the pier.", "Harbour", "Weather"};
}

ClientConfig config_for(const std::string& url, const std::string& user = "ada") {
  return {user, "secret1", url};
}

/// A reporter data dir with files to attach.
struct Desk {
  testkit::TempDir dir;
  DraftStore drafts{dir / "saved"};
  fs::path jpeg = dir / "photo.jpg";
  fs::path mp3 = dir / "clip.mp3";

  Desk() {
    testkit::write_file(jpeg, testkit::fixture("media/tiny.jpeg"));
    testkit::write_file(mp3, testkit::fixture("media/tiny.mp3"));
  }
};

}  // namespace

TEST_CASE("server urls") {
  auto u = parse_server_url("http://news.example:8080/base/");
  REQUIRE(u);
  CHECK(u->host == "news.example");
  CHECK(u->port == 8080);
  CHECK(u->base_path == "/base");
  CHECK(parse_server_url("http://localhost")->port == 80);
  CHECK_FALSE(parse_server_url("https://x"));
  CHECK_FALSE(parse_server_url("http://"));
  CHECK_FALSE(parse_server_url("http://x:0"));
  CHECK_FALSE(parse_server_url("http://x:70000"));
  CHECK_FALSE(parse_server_url("http://u@x"));
  CHECK_FALSE(parse_server_url("ftp://x"));
}

TEST_CASE("config store") {
  testkit::TempDir dir;
  ConfigStore store(dir.path());
  CHECK_FALSE(store.load());
  try {
    store.require();
    FAIL("no error");
  } catch (const ClientError& e) {
    CHECK(e.kind() == K::not_configured);
    CHECK(std::string(e.what()).find("run configure first") != std::string::npos);
  }

  const ClientConfig cfg{"ada", "pässwörd", "http://127.0.0.1:8080"};
  store.configure(cfg);
  CHECK(store.require() == cfg);
  CHECK((fs::status(dir / "config.json").permissions() & fs::perms::others_read) == fs::perms::none);
  CHECK(render_masked(cfg) ==
        "username:   ada\npassword:   ********\nserver_url: http://127.0.0.1:8080\n");

  store.save_token("t1");
  CHECK(store.cached_token() == std::optional<std::string>("t1"));
  // Changing the password keeps the session; changing the server drops it.
  store.edit({std::nullopt, "another1", std::nullopt});
  CHECK(store.cached_token());
  const auto edited = store.edit({std::nullopt, std::nullopt, "http://10.0.0.1:9000"});
  CHECK(edited.username == "ada");
  CHECK(edited.password == "another1");
  CHECK(edited.server_url == "http://10.0.0.1:9000");
  CHECK_FALSE(store.cached_token());
  CHECK(ConfigStore(dir.path()).require() == edited);

  CHECK(kind_of([&] { store.configure({"", "pw", "http://x"}); }) == K::validation);
  CHECK(kind_of([&] { store.edit({std::nullopt, std::nullopt, "https://x"}); }) == K::validation);
  CHECK(store.require() == edited);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(K::validation) == 2);
  CHECK(exit_code(K::not_configured) == 2);
  CHECK(exit_code(K::no_more_pages) == 2);
  CHECK(exit_code(K::network) == 3);
  CHECK(exit_code(K::auth) == 3);
  CHECK(exit_code(K::media_upload_failed) == 3);
  CHECK(exit_code(K::protocol) == 4);
  CHECK(exit_code(K::server) == 1);
}

TEST_CASE("compose and attach") {
  Desk desk;
  auto& drafts = desk.drafts;
  try {
    drafts.compose({"", "", "Harbour", "Weather"});
    FAIL("accepted empty draft");
  } catch (const ClientError& e) {
    CHECK(e.kind() == K::validation);
    std::set<std::string> fields;
    for (const auto& f : e.fields()) fields.insert(f.field);
    CHECK(fields == std::set<std::string>{"title", "body"});
  }
  CHECK(kind_of([&] { drafts.compose(draft_fields(std::string(257, 't'))); }) == K::validation);

  std::set<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.insert(drafts.compose(draft_fields()).id);
  CHECK(ids.size() == 50);
  CHECK(drafts.list().size() == 50);

  const Draft d = drafts.compose(draft_fields());
  Draft with = drafts.attach(d.id, desk.jpeg, MediaKind::image);
  with = drafts.attach(d.id, desk.mp3, MediaKind::audio);
  REQUIRE(with.attachments.size() == 2);
  CHECK(with.attachments[0].format == "jpeg");
  CHECK(with.attachments[1].format == "mp3");
  CHECK(with.attachments[0].source.is_absolute());
  CHECK(drafts.get(d.id).attachments == with.attachments);

  const fs::path png = desk.dir / "pic.png";
  testkit::write_file(png, testkit::fixture("media/tiny.png"));
  CHECK(kind_of([&] { drafts.attach(d.id, png, MediaKind::image); }) == K::format_mismatch);
  // Right extension, wrong content.
  const fs::path fake = desk.dir / "fake.jpeg";
  testkit::write_file(fake, testkit::fixture("media/tiny.png"));
  CHECK(kind_of([&] { drafts.attach(d.id, fake, MediaKind::image); }) == K::format_mismatch);
  CHECK(kind_of([&] { drafts.attach(d.id, desk.jpeg, MediaKind::audio); }) == K::format_mismatch);
  CHECK(kind_of([&] { drafts.attach(d.id, desk.dir / "missing.jpg", MediaKind::image); }) ==
        K::file_not_found);
  CHECK(kind_of([&] { drafts.attach("0badc0de", desk.jpeg, MediaKind::image); }) ==
        K::no_such_draft);
  CHECK(kind_of([&] { drafts.get("../etc"); }) == K::no_such_draft);
  CHECK(drafts.attach(d.id, png, MediaKind::video).attachments.back().format == "png");

  drafts.remove(d.id);
  CHECK(kind_of([&] { drafts.get(d.id); }) == K::no_such_draft);
  CHECK(kind_of([&] { drafts.remove(d.id); }) == K::no_such_draft);
}

TEST_CASE("upload sends text first and reports monotone progress") {
  testkit::StubServer stub;
  Desk desk;
  const Draft d = desk.drafts.compose(draft_fields());
  desk.drafts.attach(d.id, desk.jpeg, MediaKind::image);
  desk.drafts.attach(d.id, desk.mp3, MediaKind::audio);
  ApiClient api(config_for(stub.url()));

  std::vector<int> progress;
  const MessageId id = upload_draft(desk.drafts, d.id, api, [&](int p) { progress.push_back(p); });
  CHECK(id.value == 1);

  const auto reqs = stub.requests();
  REQUIRE(reqs.size() == 4);
  CHECK(reqs[0].path == "/api/login");
  CHECK(reqs[1].path == "/api/message");
  CHECK(reqs[1].title == "Storm hits coast");
  CHECK(reqs[2].path == "/api/media");
  CHECK(reqs[2].kind == "image");
  CHECK(reqs[2].message_id == "1");
  CHECK(reqs[2].file_data == testkit::fixture("media/tiny.jpeg"));
  CHECK(reqs[3].kind == "audio");
  CHECK(reqs[3].filename == "clip.mp3");

  REQUIRE(!progress.empty());
  CHECK(std::is_sorted(progress.begin(), progress.end()));
  CHECK(std::adjacent_find(progress.begin(), progress.end()) == progress.end());
  CHECK(progress.back() == 100);
  CHECK(std::count(progress.begin(), progress.end(), 100) == 1);

  const Draft done = desk.drafts.get(d.id);
  CHECK(done.state.phase == UploadPhase::complete);
  CHECK(done.state.media_ids.size() == 2);
  CHECK(testkit::read_file(desk.drafts.retained_copy(done, 1)) == testkit::fixture("media/tiny.mp3"));
  CHECK(kind_of([&] { upload_draft(desk.drafts, d.id, api); }) == K::validation);
}

TEST_CASE("failed text upload sends no media; failed media resumes") {
  testkit::StubServer stub;
  Desk desk;
  const Draft d = desk.drafts.compose(draft_fields());
  for (int i = 0; i < 3; ++i) desk.drafts.attach(d.id, desk.jpeg, MediaKind::image);
  ApiClient api(config_for(stub.url()));

  stub.fail_text(true);
  CHECK(kind_of([&] { upload_draft(desk.drafts, d.id, api); }) == K::text_upload_failed);
  CHECK(stub.requests_to("/api/media").empty());
  CHECK(desk.drafts.get(d.id).state.phase == UploadPhase::unsent);
  stub.fail_text(false);

  stub.fail_media_at(1);
  try {
    upload_draft(desk.drafts, d.id, api);
    FAIL("media failure not reported");
  } catch (const ClientError& e) {
    CHECK(e.kind() == K::media_upload_failed);
    CHECK(e.media_index == std::optional<std::size_t>(1));
    CHECK(e.http_status == 500);
  }
  const Draft partial = desk.drafts.get(d.id);
  CHECK(partial.state.phase == UploadPhase::text_sent);
  CHECK(partial.media_sent() == 1);

  // The reporter's original file can go away once the draft has its copy.
  fs::remove(desk.jpeg);
  stub.clear();
  stub.fail_media_at(std::nullopt);
  std::vector<int> progress;
  upload_draft(desk.drafts, d.id, api, [&](int p) { progress.push_back(p); });
  const auto resent = stub.requests();
  REQUIRE(resent.size() == 2);
  CHECK(resent[0].path == "/api/media");
  CHECK(resent[1].path == "/api/media");
  CHECK(stub.requests_to("/api/message").empty());
  CHECK(progress.front() > 0);
  CHECK(progress.back() == 100);
  CHECK(desk.drafts.get(d.id).state.media_ids.size() == 3);
}

TEST_CASE("an expired session is renewed once") {
  testkit::StubServer stub;
  Desk desk;
  ApiClient api(config_for(stub.url()));
  std::vector<std::string> issued;
  api.on_token = [&](const std::string& t) { issued.push_back(t); };
  api.create_message(draft_fields());
  stub.expire_sessions();
  stub.clear();
  api.create_message(draft_fields());
  const auto reqs = stub.requests();
  REQUIRE(reqs.size() == 3);
  CHECK(reqs[0].path == "/api/message");
  CHECK(reqs[1].path == "/api/login");
  CHECK(reqs[2].path == "/api/message");
  CHECK(issued.size() == 2);
  CHECK(issued[0] != issued[1]);

  CHECK(kind_of([] {
          ApiClient dead(config_for("http://127.0.0.1:1"));
          dead.categories();
        }) == K::network);
}

TEST_CASE("paging and reading against a live server") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();
  testkit::register_and_login(c, "ada");
  ApiClient api(config_for(srv.url()));
  for (int i = 0; i < 12; ++i) api.create_message(draft_fields("gale " + std::to_string(i)));
  const MessageId other = api.create_message({"Cup final", "Goals.", "Stadium", "sports"});
  api.create_message({"Budget", "Numbers.", "Hall", "Politics"});

  Pager pager(api, "GALE", SearchField::title);
  std::vector<std::size_t> sizes{pager.current().items.size()};
  std::set<std::int64_t> seen;
  for (const auto& i : pager.current().items) seen.insert(i.id.value);
  while (pager.has_next()) {
    const auto& page = pager.next();
    sizes.push_back(page.items.size());
    for (const auto& i : page.items) seen.insert(i.id.value);
  }
  CHECK(sizes == std::vector<std::size_t>{5, 5, 2});
  CHECK(seen.size() == 12);
  const auto before = srv.settled_log().size();
  CHECK(kind_of([&] { pager.next(); }) == K::no_more_pages);
  CHECK(srv.settled_log().size() == before);
  CHECK(render_page(pager.current()).find("page 3: results 11-12 of 12") != std::string::npos);

  Pager none(api, "zzz", SearchField::body);
  CHECK(none.current().items.empty());
  CHECK(render_page(none.current()).find("no results") != std::string::npos);

  CHECK(read_feed(api) == std::vector<std::string>{"Politics", "sports", "Weather"});
  CHECK(read_category(api, "WEATHER").size() == 12);
  CHECK(kind_of([&] { read_category(api, "Arts"); }) == K::unknown_category);

  // Two attachments show up as a count; the blobs are not fetched.
  api.upload_media(other, MediaKind::image, "a.jpeg", testkit::fixture("media/tiny.jpeg"));
  api.upload_media(other, MediaKind::audio, "b.mp3", testkit::fixture("media/tiny.mp3"));
  const auto logged = srv.settled_log().size();
  const NewsItem item = read_message(api, other);
  const std::string text = render_message(item);
  CHECK(text.find("Cup final") != std::string::npos);
  CHECK(text.find("Goals.") != std::string::npos);
  CHECK(text.find("2 attachments") != std::string::npos);
  const auto log = srv.settled_log();
  for (std::size_t i = logged; i < log.size(); ++i) {
    CHECK(log[i].find("/api/media/") == std::string::npos);
  }
  CHECK(kind_of([&] { read_message(api, MessageId{999}); }) == K::not_found);

  CHECK(kind_of([&] { api.set_status(other, MessageStatus::inactive); }) == K::auth);
}

TEST_CASE("reporter binary requires configuration") {
  testkit::TempDir dir;
  const std::string home = dir.path().string();
  auto r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "saved"});
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("run configure first") != std::string::npos);

  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "configure", "-u", "ada",
                            "-p", "secret1", "-s", "http://127.0.0.1:9"});
  CHECK(r.exit_code == 0);
  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "config", "show"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("password:   *******\n") != std::string::npos);
  CHECK(r.out.find("secret1") == std::string::npos);

  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "compose", "-t", "T", "-b",
                            "B", "--place", "P", "-c", "C"});
  CHECK(r.exit_code == 0);
  const auto id = r.out.substr(r.out.rfind(' ') + 1, 8);
  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "saved"});
  CHECK(r.out.find(id) != std::string::npos);
  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "saved", "rm", id});
  CHECK(r.exit_code == 0);
  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "saved"});
  CHECK(r.out == "no saved items\n");

  // No server listens on port 9.
  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "feed"});
  CHECK(r.exit_code == 3);
  r = testkit::run_process({NEWSROOM_REPORTER_BIN, "--data-dir", home, "frobnicate"});
  CHECK(r.exit_code == 2);
}
