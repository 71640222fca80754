// reporter: headless field-reporting client.
//
// Config, cached session token and saved items live under --data-dir
// (default: see client::default_data_dir). Exit codes: 0 ok, 2 validation or
// local errors, 3 network/auth, 4 protocol, 1 anything else.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "newsroom/client/reporter.hpp"

namespace fs = std::filesystem;
using namespace newsroom;
using namespace newsroom::client;

namespace {

MediaKind guess_kind(const fs::path& file) {
  const auto format = normalize_format(file.extension().string());
  if (format == "jpeg") return MediaKind::image;
  if (format == "mp3") return MediaKind::audio;
  return MediaKind::video;
}

MessageId message_id(std::int64_t v) { return MessageId{v}; }

void interactive_search(ApiClient& api, const std::string& keyword, SearchField field, bool all) {
  Pager pager(api, keyword, field);
  std::cout << render_page(pager.current());
  while (pager.has_next()) {
    if (!all) {
      std::cout << "-- more results: type 'next' to continue, anything else to stop --"
                << std::endl;
      std::string line;
      if (!std::getline(std::cin, line)) break;
      if (line != "next" && line != "n" && line != "NEXT") break;
    }
    std::cout << render_page(pager.next());
  }
  if (!pager.has_next() && pager.current().total_matches > 0) std::cout << "end of results\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reporter: compose, upload and read field reports"};
  app.require_subcommand(1);

  fs::path data_dir = default_data_dir();
  app.add_option("--data-dir", data_dir, "config and saved items directory");

  // configure
  ClientConfig cfg;
  auto* configure = app.add_subcommand("configure", "store username, password and server URL");
  configure->add_option("-u,--username", cfg.username)->required();
  configure->add_option("-p,--password", cfg.password)->required();
  configure->add_option("-s,--server-url", cfg.server_url, "e.g. http://127.0.0.1:8080")
      ->required();

  // config show | config edit
  auto* config = app.add_subcommand("config", "show or edit the stored configuration");
  config->require_subcommand(1);
  auto* config_show = config->add_subcommand("show", "print the configuration");
  ConfigEdit edit_cfg;
  auto* config_edit = config->add_subcommand("edit", "change selected configuration fields");
  config_edit->add_option("-u,--username", edit_cfg.username);
  config_edit->add_option("-p,--password", edit_cfg.password);
  config_edit->add_option("-s,--server-url", edit_cfg.server_url);

  std::string first_name;
  std::string last_name;
  auto* reg = app.add_subcommand("register", "create the configured account on the server");
  reg->add_option("--first-name", first_name)->required();
  reg->add_option("--last-name", last_name)->required();

  auto* login = app.add_subcommand("login", "log in and cache a session token");

  MessageFields fields;
  auto* compose = app.add_subcommand("compose", "save a new draft");
  compose->add_option("-t,--title", fields.title)->required();
  compose->add_option("-b,--body", fields.body)->required();
  compose->add_option("--place", fields.place);
  compose->add_option("-c,--category", fields.category)->required();

  std::string draft_id;
  fs::path attach_file;
  std::string attach_kind;
  auto* attach = app.add_subcommand("attach", "attach a jpeg image, mp3 audio or video file");
  attach->add_option("draft", draft_id)->required();
  attach->add_option("file", attach_file)->required();
  attach->add_option("kind", attach_kind, "image, audio or video (default: from extension)")
      ->check(CLI::IsMember({"image", "audio", "video"}));

  bool quiet = false;
  auto* upload = app.add_subcommand("upload", "upload a draft: text first, then attachments");
  upload->add_option("draft", draft_id)->required();
  upload->add_flag("-q,--quiet", quiet, "no progress lines");

  std::string keyword;
  std::string field_name = "title";
  bool all_pages = false;
  auto* search = app.add_subcommand("search", "search messages five at a time");
  search->add_option("keyword", keyword)->required();
  search->add_option("-f,--field", field_name)->check(CLI::IsMember({"title", "body", "author"}));
  search->add_flag("--all", all_pages, "print every page without prompting");

  std::int64_t edit_id = 0;
  MessagePatch patch;
  auto* edit = app.add_subcommand("edit", "change fields of an uploaded message");
  edit->add_option("id", edit_id)->required();
  edit->add_option("-t,--title", patch.title);
  edit->add_option("-b,--body", patch.body);
  edit->add_option("--place", patch.place);
  edit->add_option("-c,--category", patch.category);

  std::string feed_category;
  std::optional<std::int64_t> feed_message;
  auto* feed = app.add_subcommand("feed", "browse categories, titles and messages");
  auto* feed_cat_opt = feed->add_option("category", feed_category, "list titles in a category");
  feed->add_option("-m,--message", feed_message, "show one message")->excludes(feed_cat_opt);

  auto* saved = app.add_subcommand("saved", "list saved items");
  std::string saved_rm_id;
  auto* saved_rm = saved->add_subcommand("rm", "delete a saved item locally");
  saved_rm->add_option("draft", saved_rm_id)->required();

  auto* admin = app.add_subcommand("admin", "moderation (admin accounts only)");
  admin->require_subcommand(1);
  std::int64_t admin_id = 0;
  std::string admin_state;
  auto* admin_status = admin->add_subcommand("status", "activate or deactivate a message");
  admin_status->add_option("id", admin_id)->required();
  admin_status->add_option("state", admin_state)
      ->required()
      ->check(CLI::IsMember({"active", "inactive"}));
  auto* admin_rm = admin->add_subcommand("rm", "delete a message");
  admin_rm->add_option("id", admin_id)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    Reporter reporter(data_dir);

    if (*configure) {
      reporter.config().configure(cfg);
      std::cout << "saved configuration to " << (data_dir / ConfigStore::kConfigFile).string()
                << '\n';
      return 0;
    }
    // Everything else starts from a stored configuration.
    const ClientConfig current = reporter.config().require();

    if (*config_show) {
      std::cout << render_masked(current);
    } else if (*config_edit) {
      std::cout << render_masked(reporter.config().edit(edit_cfg));
    } else if (*reg) {
      auto api = reporter.api();
      std::cout << api.register_user(first_name, last_name).message << '\n';
    } else if (*login) {
      auto api = reporter.api();
      api.login();
      std::cout << "logged in as " << current.username << '\n';
    } else if (*compose) {
      const Draft d = reporter.drafts().compose(fields);
      std::cout << "saved draft " << d.id << '\n';
    } else if (*attach) {
      const MediaKind kind =
          attach_kind.empty() ? guess_kind(attach_file) : *parse_media_kind(attach_kind);
      const Draft d = reporter.drafts().attach(draft_id, attach_file, kind);
      std::cout << "attached " << attach_file.filename().string() << " as " << to_string(kind)
                << " (" << d.attachments.size() << " attachment"
                << (d.attachments.size() == 1 ? "" : "s") << ")\n";
    } else if (*upload) {
      auto api = reporter.api();
      const MessageId id = upload_draft(reporter.drafts(), draft_id, api, [&](int pct) {
        if (!quiet) std::cout << "progress " << pct << '%' << std::endl;
      });
      std::cout << "uploaded message " << id.value << '\n';
    } else if (*search) {
      auto api = reporter.api();
      interactive_search(api, keyword, *parse_search_field(field_name), all_pages);
    } else if (*edit) {
      if (patch.empty()) {
        std::cerr << "edit: nothing to change (use --title, --body, --place or --category)\n";
        return 2;
      }
      auto api = reporter.api();
      std::cout << api.update_message(message_id(edit_id), patch).message << '\n';
    } else if (*feed) {
      auto api = reporter.api();
      if (feed_message) {
        std::cout << render_message(read_message(api, message_id(*feed_message)));
      } else if (!feed_category.empty()) {
        const auto items = read_category(api, feed_category);
        if (items.empty()) std::cout << "no messages in " << feed_category << '\n';
        for (const auto& item : items) std::cout << render_summary_line(item) << '\n';
      } else {
        const auto names = read_feed(api);
        if (names.empty()) std::cout << "no categories\n";
        for (const auto& n : names) std::cout << n << '\n';
      }
    } else if (*saved_rm) {
      reporter.drafts().remove(saved_rm_id);
      std::cout << "deleted saved item " << saved_rm_id << '\n';
    } else if (*saved) {
      const auto drafts = reporter.drafts().list();
      if (drafts.empty()) std::cout << "no saved items\n";
      for (const auto& d : drafts) std::cout << render_draft(d) << '\n';
    } else if (*admin_status) {
      auto api = reporter.api();
      std::cout << api.set_status(message_id(admin_id), *parse_status(admin_state)).message
                << '\n';
    } else if (*admin_rm) {
      auto api = reporter.api();
      std::cout << api.delete_message(message_id(admin_id)).message << '\n';
    }
    return 0;
  } catch (const ClientError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
