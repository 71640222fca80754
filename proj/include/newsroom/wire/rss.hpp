#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/core/model.hpp"

namespace newsroom::wire {

struct FeedInfo {
  std::string title;
  std::string link;
  std::string description;

  friend bool operator==(const FeedInfo&, const FeedInfo&) = default;
};

struct FeedItem {
  std::string title;
  std::string description;
  std::string category;
  std::string author;
  Timestamp published;  // whole seconds
  MessageId guid;

  friend bool operator==(const FeedItem&, const FeedItem&) = default;
};

struct Feed {
  FeedInfo info;
  std::vector<FeedItem> items;

  friend bool operator==(const Feed&, const Feed&) = default;
};

/// RSS 2.0 item for one message; pubDate truncated to seconds.
FeedItem feed_item(const Message& msg);

/// `messages` must already be in viewer order.
std::string encode_rss(const FeedInfo& info, std::span<const Message> messages);
std::string encode_rss(const Feed& feed);

/// Reads documents produced by encode_rss. Throws ProtocolError.
Feed decode_rss(std::string_view bytes);

}  // namespace newsroom::wire
