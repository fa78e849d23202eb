#include "streamdelay/receiver.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>
#include <string>

namespace streamdelay {

namespace {

constexpr std::size_t min_width = 64;

} // namespace

/*------------------------------------------------------------------------------------------------*/

ReceiverState::ReceiverState()
{
  rebuild(0);
}

/*------------------------------------------------------------------------------------------------*/

bool
ReceiverState::add_innovative(std::uint64_t max_index)
{
  if (max_index <= decoded_)
  {
    throw std::logic_error("innovative combination with highest index " + std::to_string(max_index)
                           + " at or below decoded prefix " + std::to_string(decoded_));
  }
  if (max_index >= base_ + width_)
  {
    rebuild(max_index);
  }
  ++rank_;
  top_ = std::max(top_, max_index);
  add_suffix(1, 0, width_ - 1, static_cast<std::size_t>(max_index - base_));

  // Only indices >= max_index changed, so a new zero can only appear there.
  const long hit = find_rightmost_zero(1, 0, width_ - 1, static_cast<std::size_t>(max_index - base_));
  assert(rank_ >= decoded_);
  if (hit < 0)
  {
    return false;
  }
  decoded_ = base_ + static_cast<std::uint64_t>(hit);
  assert(decoded_ <= rank_);
  return true;
}

/*------------------------------------------------------------------------------------------------*/

void
ReceiverState::rebuild(std::uint64_t need_top)
{
  std::vector<std::int64_t> old;
  if (width_ > 0)
  {
    old.reserve(width_);
    collect(1, 0, width_ - 1, old);
  }
  const std::uint64_t old_base = base_;

  const std::uint64_t span = std::max<std::uint64_t>(need_top, top_) - decoded_ + 1;
  width_ = std::max<std::size_t>(min_width, std::bit_ceil(static_cast<std::size_t>(2 * span)));
  base_ = decoded_ + 1;

  // Leaves beyond the tracked range carry j - rank: no stored combination reaches them.
  std::vector<std::int64_t> leaves(width_);
  for (std::size_t i = 0; i < width_; ++i)
  {
    const std::uint64_t j = base_ + i;
    if (j < old_base + old.size())
    {
      leaves[i] = old[j - old_base];
    }
    else
    {
      leaves[i] = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(rank_);
    }
  }

  min_.assign(2 * width_, 0);
  lazy_.assign(2 * width_, 0);
  for (std::size_t i = 0; i < width_; ++i)
  {
    min_[width_ + i] = leaves[i];
  }
  for (std::size_t n = width_ - 1; n >= 1; --n)
  {
    min_[n] = std::min(min_[2 * n], min_[2 * n + 1]);
  }
}

/*------------------------------------------------------------------------------------------------*/

// The tree is a perfect binary tree stored heap-style: node n covers a power-of-two range and
// leaves live at [width_, 2 * width_).

void
ReceiverState::push(std::size_t node)
{
  if (lazy_[node] != 0)
  {
    for (const std::size_t child : {2 * node, 2 * node + 1})
    {
      min_[child] += lazy_[node];
      lazy_[child] += lazy_[node];
    }
    lazy_[node] = 0;
  }
}

void
ReceiverState::add_suffix(std::size_t node, std::size_t lo, std::size_t hi, std::size_t from)
{
  if (hi < from)
  {
    return;
  }
  if (lo >= from)
  {
    min_[node] -= 1;
    lazy_[node] -= 1;
    return;
  }
  push(node);
  const std::size_t mid = (lo + hi) / 2;
  add_suffix(2 * node, lo, mid, from);
  add_suffix(2 * node + 1, mid + 1, hi, from);
  min_[node] = std::min(min_[2 * node], min_[2 * node + 1]);
}

long
ReceiverState::find_rightmost_zero(std::size_t node, std::size_t lo, std::size_t hi, std::size_t from)
{
  if (hi < from || min_[node] > 0)
  {
    return -1;
  }
  if (lo == hi)
  {
    return static_cast<long>(lo);
  }
  push(node);
  const std::size_t mid = (lo + hi) / 2;
  const long right = find_rightmost_zero(2 * node + 1, mid + 1, hi, from);
  if (right >= 0)
  {
    return right;
  }
  return find_rightmost_zero(2 * node, lo, mid, from);
}

void
ReceiverState::collect(std::size_t node, std::size_t lo, std::size_t hi, std::vector<std::int64_t>& out)
{
  if (lo == hi)
  {
    out.push_back(min_[node]);
    return;
  }
  push(node);
  const std::size_t mid = (lo + hi) / 2;
  collect(2 * node, lo, mid, out);
  collect(2 * node + 1, mid + 1, hi, out);
}

} // namespace streamdelay
