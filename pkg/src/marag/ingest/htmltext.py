"""Plain-text extraction from HTML pages.

Built on html.parser from the standard library rather than a full DOM:
we only need readable body text, heading positions (to label chunks
with a heading path), outbound links (to drive the crawler), and the
page title. Boilerplate containers — scripts, styles, nav, headers,
footers, asides — are dropped entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser
from urllib.parse import urldefrag, urljoin

from marag.ingest.documents import Heading

_SKIP_TAGS = {"script", "style", "noscript", "template", "svg", "nav", "header", "footer", "aside"}
_BLOCK_TAGS = {
    "p", "div", "section", "article", "main", "li", "ul", "ol", "table", "tr", "td", "th",
    "h1", "h2", "h3", "h4", "h5", "h6", "pre", "blockquote", "br", "hr", "figure", "figcaption",
    "dl", "dt", "dd",
}
_HEADING_LEVEL = {"h1": 1, "h2": 2, "h3": 3, "h4": 4, "h5": 5, "h6": 6}


@dataclass
class ExtractedPage:
    title: str
    text: str
    headings: list[Heading] = field(default_factory=list)
    links: list[str] = field(default_factory=list)


class _Extractor(HTMLParser):
    def __init__(self, page_url: str):
        super().__init__(convert_charrefs=True)
        self.page_url = page_url
        self.blocks: list[str] = []
        self.buf: list[str] = []
        self.headings: list[tuple[int, int, str]] = []  # (block index, level, text)
        self.links: list[str] = []
        self.title_parts: list[str] = []
        self._skip_depth = 0
        self._in_title = False
        self._heading_level: int | None = None
        self._heading_buf: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
            return
        if self._skip_depth:
            return
        if tag == "title":
            self._in_title = True
        if tag == "a":
            href = dict(attrs).get("href")
            if href:
                absolute, _ = urldefrag(urljoin(self.page_url, href))
                self.links.append(absolute)
        if tag in _HEADING_LEVEL:
            self._flush_block()
            self._heading_level = _HEADING_LEVEL[tag]
            self._heading_buf = []
        elif tag in _BLOCK_TAGS:
            self._flush_block()

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
            return
        if self._skip_depth:
            return
        if tag == "title":
            self._in_title = False
        if tag in _HEADING_LEVEL and self._heading_level is not None:
            text = " ".join("".join(self._heading_buf).split())
            if text:
                self.headings.append((len(self.blocks), self._heading_level, text))
                self.blocks.append(text)
            self._heading_level = None
            self._heading_buf = []
        elif tag in _BLOCK_TAGS:
            self._flush_block()

    def handle_data(self, data):
        if self._skip_depth:
            return
        if self._in_title:
            self.title_parts.append(data)
        elif self._heading_level is not None:
            self._heading_buf.append(data)
        else:
            self.buf.append(data)

    def _flush_block(self):
        text = " ".join("".join(self.buf).split())
        self.buf = []
        if text:
            self.blocks.append(text)


def extract_page(html: str, page_url: str) -> ExtractedPage:
    """Readable text, headings with character offsets, links, and title."""
    parser = _Extractor(page_url)
    parser.feed(html)
    parser.close()
    parser._flush_block()

    offsets: list[int] = []
    pos = 0
    for i, block in enumerate(parser.blocks):
        offsets.append(pos)
        pos += len(block) + (2 if i < len(parser.blocks) - 1 else 0)
    text = "\n\n".join(parser.blocks)

    headings = [
        Heading(offset=offsets[idx], level=level, text=htext)
        for idx, level, htext in parser.headings
        if idx < len(offsets)
    ]
    title = " ".join("".join(parser.title_parts).split())
    if not title and headings:
        title = headings[0].text
    return ExtractedPage(title=title, text=text, headings=headings, links=parser.links)
