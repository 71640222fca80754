#include <random>
#include <regex>

#include "doctest.h"
#include "live_server.hpp"
#include "newsroom/wire/multipart.hpp"
#include "newsroom/wire/news_xml.hpp"
#include "newsroom/wire/rss.hpp"
#include "newsroom/wire/status.hpp"
#include "process.hpp"
#include "testkit.hpp"

using namespace newsroom;
using testkit::LiveServer;
namespace fs = std::filesystem;

namespace {

httplib::Headers auth(const std::string& token) { return {{"X-Auth-Token", token}}; }

httplib::Params message_form(const std::string& title, const std::string& category = "Sports") {
  return {{"title", title}, {"body", "body of " + title}, {"place", "Harbour"}, {"category", category}};
}

std::int64_t create(httplib::Client& c, const std::string& token, const std::string& title,
                    const std::string& category = "Sports") {
  auto res = c.Post("/api/message", auth(token), message_form(title, category));
  REQUIRE(res);
  REQUIRE(res->status == 200);
  return wire::decode_created(res->body);
}

httplib::Result post_media(httplib::Client& c, const std::string& token, std::string message_id,
                           std::string kind, std::string filename, std::string bytes) {
  const auto mp = wire::encode_multipart({
      {"message_id", std::nullopt, std::nullopt, std::move(message_id)},
      {"kind", std::nullopt, std::nullopt, std::move(kind)},
      {"file", std::move(filename), "application/octet-stream", std::move(bytes)},
  });
  return c.Post("/api/media", auth(token), mp.body, mp.content_type().c_str());
}

wire::StatusPayload status_of(const httplib::Result& res) {
  REQUIRE(res);
  return wire::decode_status(res->body);
}

std::vector<std::int64_t> ids_of(const std::vector<NewsItem>& items) {
  std::vector<std::int64_t> out;
  for (const auto& i : items) out.push_back(i.id.value);
  return out;
}

std::vector<NewsItem> viewer_list(httplib::Client& c, const std::string& query = "") {
  auto res = c.Get("/api/messages" + query);
  REQUIRE(res);
  REQUIRE(res->status == 200);
  return wire::decode_result_page(res->body).items;
}

}  // namespace

TEST_CASE("register and login") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();

  const httplib::Params good{
      {"first_name", "Ada"}, {"last_name", "Lovelace"}, {"username", "ada"}, {"password", "secret1"}};
  auto res = c.Post("/api/register", good);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(status_of(res) == wire::StatusPayload::ok("registration successful"));

  res = c.Post("/api/register", good);
  CHECK(res->status == 409);
  CHECK(status_of(res).code == wire::StatusCode::error);

  res = c.Post("/api/register", httplib::Params{{"first_name", ""},
                                                {"last_name", "X"},
                                                {"username", "zz"},
                                                {"password", "123"}});
  REQUIRE(res);
  CHECK(res->status == 422);
  const auto bad = status_of(res);
  std::set<std::string> fields;
  for (const auto& d : bad.detail) fields.insert(d.field);
  CHECK(fields.count("first_name") == 1);
  CHECK(fields.count("username") == 1);
  CHECK(fields.count("password") == 1);
  CHECK(fields.count("last_name") == 0);

  res = c.Post("/api/login", httplib::Params{{"username", "ada"}, {"password", "secret1"}});
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(wire::decode_session(res->body).size() == 64);

  auto wrong = c.Post("/api/login", httplib::Params{{"username", "ada"}, {"password", "nope!!"}});
  auto unknown = c.Post("/api/login", httplib::Params{{"username", "bob"}, {"password", "secret1"}});
  CHECK(wrong->status == 401);
  CHECK(unknown->status == 401);
  CHECK(wrong->body == unknown->body);
}

TEST_CASE("message creation and categories") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();

  auto res = c.Post("/api/message", message_form("No token"));
  REQUIRE(res);
  CHECK(res->status == 401);
  res = c.Post("/api/message", auth(std::string(64, 'a')), message_form("Bad token"));
  CHECK(res->status == 401);

  const auto token = testkit::register_and_login(c, "ada");
  CHECK(create(c, token, "First", "Sports") == 1);
  CHECK(create(c, token, "Second", "weather") == 2);
  CHECK(create(c, token, "Third", "SPORTS") == 3);
  // Token as a form field works too.
  auto form = message_form("Fourth");
  form.emplace("token", token);
  res = c.Post("/api/message", form);
  CHECK(res->status == 200);

  res = c.Get("/api/categories");
  REQUIRE(res);
  CHECK(wire::decode_categories(res->body) == std::vector<std::string>{"Sports", "weather"});

  res = c.Post("/api/message", auth(token), message_form(""));
  CHECK(res->status == 422);
  CHECK(status_of(res).detail.at(0).field == "title");
  res = c.Post("/api/message", auth(token), message_form(std::string(257, 'x')));
  CHECK(res->status == 422);
}

TEST_CASE("media upload and download") {
  testkit::TempDir dir;
  auto config = testkit::test_config(dir.path());
  config.max_upload_bytes = 4096;
  LiveServer srv(config);
  auto c = srv.client();
  const auto token = testkit::register_and_login(c, "ada");
  const auto id = std::to_string(create(c, token, "With media"));

  std::mt19937_64 rng(5);
  std::string jpeg = "\xFF\xD8\xFF" + testkit::random_bytes(rng, 2000) + "\r\n--";
  auto res = post_media(c, token, id, "image", "photo.jpg", jpeg);
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto media_id = wire::decode_created(res->body);
  CHECK(media_id == 1);
  CHECK(testkit::read_file(dir / "media/1/1.jpeg") == jpeg);

  res = c.Get("/api/media/" + id + "/1");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == jpeg);
  CHECK(res->get_header_value("Content-Type") == "image/jpeg");

  // The limit is inclusive.
  res = post_media(c, token, id, "video", "clip.mp4", std::string(4096, 'v'));
  CHECK(res->status == 200);
  res = post_media(c, token, id, "video", "clip.mp4", std::string(4097, 'v'));
  REQUIRE(res);
  CHECK(res->status == 413);

  res = post_media(c, token, id, "audio", "song.wav", "RIFF");
  CHECK(res->status == 415);
  res = post_media(c, token, "99", "audio", "song.mp3", "ID3");
  CHECK(res->status == 404);
  res = post_media(c, token, id, "hologram", "x.mp3", "ID3");
  CHECK(res->status == 422);
  res = post_media(c, "", id, "audio", "song.mp3", "ID3");
  CHECK(res->status == 401);

  // Missing parts are reported by name.
  const auto partial = wire::encode_multipart({{"kind", std::nullopt, std::nullopt, "audio"}});
  res = c.Post("/api/media", auth(token), partial.body, partial.content_type().c_str());
  REQUIRE(res);
  CHECK(res->status == 422);
  const auto detail = status_of(res).detail;
  REQUIRE(detail.size() == 2);
  CHECK(detail[0].field == "message_id");
  CHECK(detail[1].field == "file");

  res = c.Post("/api/media", auth(token), "--x\r\nbroken", "multipart/form-data; boundary=x");
  CHECK(res->status == 400);

  res = c.Get("/api/message/" + id);
  REQUIRE(res);
  const NewsItem item = wire::decode_news(res->body);
  CHECK(item.media_count == 2);
  CHECK(item.thumbnail == MediaId{1});
  REQUIRE(item.media.size() == 2);
  CHECK(item.media[0].byte_length == jpeg.size());
  CHECK(item.media[1].format == "mp4");

  CHECK(c.Get("/api/media/" + id + "/77")->status == 404);
}

TEST_CASE("search pages of five") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();
  const auto token = testkit::register_and_login(c, "ada");
  for (int i = 0; i < 12; ++i) create(c, token, "alpha " + std::to_string(i));
  create(c, token, "beta");

  std::vector<std::int64_t> seen;
  std::vector<std::size_t> sizes;
  for (int page = 1; page <= 3; ++page) {
    auto res = c.Get("/api/search?q=ALPHA&page=" + std::to_string(page), auth(token));
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const auto rp = wire::decode_result_page(res->body);
    CHECK(rp.page == static_cast<std::size_t>(page));
    CHECK(rp.total_matches == 12);
    CHECK(rp.has_more == (page < 3));
    sizes.push_back(rp.items.size());
    for (auto id : ids_of(rp.items)) seen.push_back(id);
  }
  CHECK(sizes == std::vector<std::size_t>{5, 5, 2});
  // Same-millisecond inserts fall back to larger id first.
  std::vector<std::int64_t> sorted = seen;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  CHECK(seen == sorted);

  auto past = c.Get("/api/search?q=alpha&page=4", auth(token));
  const auto empty = wire::decode_result_page(past->body);
  CHECK(empty.items.empty());
  CHECK_FALSE(empty.has_more);

  auto by_author = c.Get("/api/search?q=AD&field=author", auth(token));
  CHECK(wire::decode_result_page(by_author->body).total_matches == 13);
  auto by_body = c.Get("/api/search?q=of%20beta&field=body", auth(token));
  CHECK(wire::decode_result_page(by_body->body).total_matches == 1);

  CHECK(c.Get("/api/search?q=alpha&field=date", auth(token))->status == 400);
  CHECK(c.Get("/api/search?q=", auth(token))->status == 400);
  CHECK(c.Get("/api/search?q=alpha&page=0", auth(token))->status == 400);
  CHECK(c.Get("/api/search?q=alpha")->status == 401);
}

TEST_CASE("update, viewer order and visibility") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();
  const auto token = testkit::register_and_login(c, "ada");
  const auto admin = testkit::register_and_login(c, "admin");
  const auto a = create(c, token, "Older", "Sports");
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  const auto b = create(c, token, "Newer", "Weather");
  CHECK(ids_of(viewer_list(c)) == std::vector<std::int64_t>{b, a});
  CHECK(ids_of(viewer_list(c, "?category=sports")) == std::vector<std::int64_t>{a});
  CHECK(c.Get("/api/messages?category=Nope")->status == 404);

  auto res = c.Post("/api/message/" + std::to_string(a) + "/update", auth(token),
                    httplib::Params{{"title", "Older, edited"}});
  CHECK(res->status == 200);
  // Editing does not reorder: ordering is by creation time.
  const auto list = viewer_list(c);
  CHECK(ids_of(list) == std::vector<std::int64_t>{b, a});
  CHECK(list[1].title == "Older, edited");
  CHECK(list[1].body == "body of Older");
  CHECK(c.Post("/api/message/" + std::to_string(a) + "/update", auth(token), httplib::Params{})
            ->status == 422);
  CHECK(c.Post("/api/message/99/update", auth(token), httplib::Params{{"title", "x"}})->status ==
        404);

  res = c.Post("/api/admin/message/" + std::to_string(b) + "/status", auth(admin),
               httplib::Params{{"status", "inactive"}});
  CHECK(res->status == 200);
  CHECK(ids_of(viewer_list(c)) == std::vector<std::int64_t>{a});
  CHECK(viewer_list(c, "?category=weather").empty());
  CHECK(c.Get("/api/message/" + std::to_string(b))->status == 404);
  CHECK(c.Get("/api/message/" + std::to_string(b), auth(token))->status == 404);
  CHECK(c.Get("/api/message/" + std::to_string(b), auth(admin))->status == 200);
  // Authenticated search still reaches inactive messages.
  auto found = c.Get("/api/search?q=newer", auth(token));
  const auto page = wire::decode_result_page(found->body);
  REQUIRE(page.items.size() == 1);
  CHECK(page.items[0].status == MessageStatus::inactive);

  res = c.Get("/feed.xml");
  REQUIRE(res);
  CHECK(res->get_header_value("Content-Type").rfind("application/rss+xml", 0) == 0);
  const auto feed = wire::decode_rss(res->body);
  REQUIRE(feed.items.size() == 1);
  CHECK(feed.items[0].guid == MessageId{a});
  CHECK(feed.items[0].title == "Older, edited");
  CHECK(feed.info.title == "Newsroom");

  CHECK(c.Post("/api/admin/message/" + std::to_string(b) + "/status", auth(admin),
               httplib::Params{{"status", "gone"}})
            ->status == 400);
  CHECK(c.Post("/api/admin/message/" + std::to_string(b) + "/status", auth(admin),
               httplib::Params{{"status", "active"}})
            ->status == 200);
  CHECK(viewer_list(c).size() == 2);
}

TEST_CASE("admin routes require an admin session") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();
  const auto token = testkit::register_and_login(c, "ada");
  const auto admin = testkit::register_and_login(c, "admin");
  const auto id = std::to_string(create(c, token, "Doomed"));
  REQUIRE(post_media(c, token, id, "audio", "a.mp3", "ID3abc")->status == 200);
  REQUIRE(fs::exists(dir / "media" / id));

  const httplib::Params inactive{{"status", "inactive"}};
  CHECK(c.Post("/api/admin/message/" + id + "/status", inactive)->status == 401);
  CHECK(c.Post("/api/admin/message/" + id + "/status", auth(token), inactive)->status == 403);
  CHECK(c.Delete("/api/admin/message/" + id)->status == 401);
  CHECK(c.Delete("/api/admin/message/" + id, auth(token))->status == 403);

  auto res = c.Delete("/api/admin/message/" + id, auth(admin));
  CHECK(res->status == 200);
  CHECK(c.Get("/api/message/" + id, auth(admin))->status == 404);
  CHECK(c.Get("/api/media/" + id + "/1")->status == 404);
  CHECK_FALSE(fs::exists(dir / "media" / id));
  CHECK(c.Delete("/api/admin/message/" + id, auth(admin))->status == 404);
}

TEST_CASE("errors are status documents and requests are logged") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();
  c.set_keep_alive(true);  // one connection keeps log lines in request order
  auto res = c.Get("/no/such/route");
  REQUIRE(res);
  CHECK(res->status == 404);
  CHECK(status_of(res).code == wire::StatusCode::error);
  CHECK(c.Get("/admin/index.html")->status == 404);

  c.Get("/api/categories");
  const auto log = srv.settled_log();
  REQUIRE(log.size() >= 2);
  const std::regex line(R"((GET|POST|DELETE) (/\S*) (\d{3}) (\d+)ms)");
  for (const auto& l : log) CHECK_MESSAGE(std::regex_match(l, line), l);
  CHECK(log.back().rfind("GET /api/categories 200 ", 0) == 0);
}

TEST_CASE("static admin mount") {
  testkit::TempDir dir;
  testkit::TempDir ui;
  testkit::write_file(ui / "index.html", "<html>admin</html>");
  auto config = testkit::test_config(dir.path());
  config.admin_ui_dir = ui.path();
  LiveServer srv(config);
  auto c = srv.client();
  auto res = c.Get("/admin/index.html");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "<html>admin</html>");
  CHECK(c.Get("/api/categories")->status == 200);
}

TEST_CASE("concurrent clients") {
  testkit::TempDir dir;
  LiveServer srv(testkit::test_config(dir.path()));
  auto c = srv.client();
  const auto token = testkit::register_and_login(c, "ada");
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] {
      auto mine = srv.client();
      for (int i = 0; i < 10; ++i) {
        auto res = mine.Post("/api/message", auth(token), message_form("t" + std::to_string(t)));
        if (res && res->status == 200) ++ok;
        mine.Get("/api/messages");
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok == 60);
  CHECK(viewer_list(c).size() == 60);
}

TEST_CASE("server binary: init, run, signal shutdown") {
  testkit::TempDir root;
  const auto data = (root / "data").string();
  auto first = testkit::run_process({NEWSROOM_SERVER_BIN, "init", "--data-dir", data});
  CHECK(first.exit_code == 0);
  CHECK(fs::exists(fs::path(data) / "server.conf"));
  CHECK(fs::exists(fs::path(data) / "records.db"));
  auto second = testkit::run_process({NEWSROOM_SERVER_BIN, "init", "--data-dir", data});
  CHECK(second.exit_code == 2);
  CHECK(second.err.find("not empty") != std::string::npos);

  CHECK(testkit::run_process({NEWSROOM_SERVER_BIN, "run"}).exit_code == 2);
  CHECK(testkit::run_process({NEWSROOM_SERVER_BIN, "bogus"}).exit_code == 2);

  testkit::Child child({NEWSROOM_SERVER_BIN, "run", "--data-dir", data, "--port", "0"});
  const auto banner = child.read_line();
  REQUIRE(banner);
  std::smatch m;
  REQUIRE(std::regex_match(*banner, m, std::regex(R"(listening on 127\.0\.0\.1:(\d+))")));
  httplib::Client c("127.0.0.1", std::stoi(m[1]));
  auto res = c.Get("/feed.xml");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(wire::decode_rss(res->body).items.empty());
  const auto logged = child.read_line();
  REQUIRE(logged);
  CHECK(logged->rfind("GET /feed.xml 200 ", 0) == 0);

  child.kill(SIGINT);
  CHECK(child.read_line() == std::optional<std::string>("stopped"));
  const int status = child.wait();
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
}
