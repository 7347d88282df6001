"""Video transcript fetching.

Talks to a caption endpoint serving timestamped segments as JSON:

    GET {base_url}/transcripts/{video_id}
    -> 200 {"segments": [{"start": 0.0, "end": 4.0, "text": "..."}, ...]}
    -> 404 when the video has no captions

The base URL is configuration so tests (and deployments that proxy a
captions provider) can point it anywhere.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from typing import Callable
from urllib.parse import parse_qs, urlsplit

import httpx

from marag.errors import InvalidUrl, NoTranscriptAvailable, RateLimited, UpstreamUnreachable
from marag.httpclient import HttpSettings, request_with_retries

_VIDEO_HOSTS = {"youtube.com", "www.youtube.com", "m.youtube.com", "youtu.be", "www.youtu.be"}
_VIDEO_ID = re.compile(r"^[A-Za-z0-9_-]{4,64}$")


@dataclass(frozen=True)
class TranscriptSegment:
    start_seconds: float
    end_seconds: float
    text: str

    def __post_init__(self):
        if self.start_seconds < 0:
            raise ValueError("start_seconds must be non-negative")
        if self.end_seconds < self.start_seconds:
            raise ValueError("end_seconds must be >= start_seconds")


def extract_video_id(video_url: str) -> str:
    """Video id from the usual URL shapes (watch?v=, youtu.be/, /embed/,
    /shorts/). Raises InvalidUrl for anything else."""
    parts = urlsplit(video_url)
    if parts.scheme not in ("http", "https") or parts.hostname is None:
        raise InvalidUrl(f"not a video URL: {video_url!r}")
    if parts.hostname.lower() not in _VIDEO_HOSTS:
        raise InvalidUrl(f"unrecognized video host: {parts.hostname!r}")
    candidate = None
    if parts.hostname.lower().endswith("youtu.be"):
        candidate = parts.path.lstrip("/").split("/")[0]
    elif parts.path == "/watch":
        candidate = (parse_qs(parts.query).get("v") or [None])[0]
    else:
        segments = [s for s in parts.path.split("/") if s]
        if len(segments) == 2 and segments[0] in ("embed", "shorts", "v", "live"):
            candidate = segments[1]
    if not candidate or not _VIDEO_ID.match(candidate):
        raise InvalidUrl(f"cannot extract a video id from {video_url!r}")
    return candidate


def normalize_segments(segments: list[TranscriptSegment]) -> list[TranscriptSegment]:
    """Sort by start time and clip overlaps so segments are well-ordered."""
    ordered = sorted(segments, key=lambda s: (s.start_seconds, s.end_seconds))
    result: list[TranscriptSegment] = []
    prev_end = 0.0
    for seg in ordered:
        start = max(seg.start_seconds, prev_end)
        end = max(seg.end_seconds, start)
        result.append(TranscriptSegment(start, end, seg.text))
        prev_end = end
    return result


class TranscriptClient:
    def __init__(
        self,
        base_url: str,
        *,
        settings: HttpSettings = HttpSettings(),
        sleep: Callable[[float], None] = time.sleep,
    ):
        self._settings = settings
        self._sleep = sleep
        self._client = httpx.Client(base_url=base_url.rstrip("/"), timeout=settings.timeout)

    def close(self) -> None:
        self._client.close()

    def fetch(self, video_url: str) -> list[TranscriptSegment]:
        video_id = extract_video_id(video_url)
        try:
            response = request_with_retries(
                self._client,
                "GET",
                f"/transcripts/{video_id}",
                settings=self._settings,
                sleep=self._sleep,
            )
        except httpx.TransportError as exc:
            raise UpstreamUnreachable(f"transcript endpoint unreachable: {exc}") from exc
        if response.status_code == 404:
            raise NoTranscriptAvailable(f"no transcript for video {video_id}")
        if response.status_code == 429:
            raise RateLimited("transcript endpoint rate limit")
        if response.status_code != 200:
            raise UpstreamUnreachable(
                f"transcript endpoint returned {response.status_code} for video {video_id}"
            )
        payload = response.json()
        segments = [
            TranscriptSegment(float(item["start"]), float(item["end"]), str(item.get("text", "")))
            for item in payload.get("segments", [])
        ]
        if not segments:
            raise NoTranscriptAvailable(f"transcript for video {video_id} is empty")
        return normalize_segments(segments)
