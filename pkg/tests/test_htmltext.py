"""HTML extraction: boilerplate stripping, headings, links, titles."""

from stubs import DOCS_INDEX
from marag.ingest.htmltext import extract_page

PAGE_URL = "http://host/docs/index.html"


class TestBoilerplate:
    def test_scripts_styles_and_chrome_are_dropped(self):
        page = extract_page(DOCS_INDEX, PAGE_URL)
        assert "console.log" not in page.text
        assert "color: red" not in page.text
        assert "chrome link" not in page.text  # inside <nav>
        assert "copyright nobody" not in page.text  # inside <footer>
        assert "crewkit wraps the CrewAI framework" in page.text

    def test_links_inside_skipped_containers_are_not_collected(self):
        page = extract_page(DOCS_INDEX, PAGE_URL)
        assert not any("hidden.html" in link for link in page.links)

    def test_nested_skip_containers(self):
        html = "<body><nav><div><p>deep chrome</p></div></nav><p>real text</p></body>"
        page = extract_page(html, PAGE_URL)
        assert page.text == "real text"


class TestTextAssembly:
    def test_blocks_join_with_blank_lines(self):
        html = "<h1>Top</h1><p>one</p><p>two</p>"
        page = extract_page(html, PAGE_URL)
        assert page.text == "Top\n\none\n\ntwo"

    def test_inline_tags_do_not_split_words(self):
        html = "<p>a <b>bold</b> and <code>mono</code> word</p>"
        page = extract_page(html, PAGE_URL)
        assert page.text == "a bold and mono word"

    def test_whitespace_is_collapsed(self):
        html = "<p>  spaced\n   out\ttext  </p>"
        page = extract_page(html, PAGE_URL)
        assert page.text == "spaced out text"


class TestHeadings:
    def test_offsets_point_at_heading_text(self):
        page = extract_page(DOCS_INDEX, PAGE_URL)
        assert [(h.level, h.text) for h in page.headings] == [
            (1, "crewkit documentation"),
            (2, "Guides"),
        ]
        for heading in page.headings:
            assert page.text[heading.offset : heading.offset + len(heading.text)] == heading.text

    def test_levels_beyond_h2(self):
        html = "<h1>A</h1><p>x</p><h3>B</h3><p>y</p>"
        page = extract_page(html, PAGE_URL)
        assert [(h.level, h.text) for h in page.headings] == [(1, "A"), (3, "B")]


class TestLinksAndTitle:
    def test_links_are_absolutized_and_defragmented(self):
        page = extract_page(DOCS_INDEX, PAGE_URL)
        assert "http://host/docs/tools.html" in page.links
        assert "http://host/docs/agents.html" in page.links  # #setup stripped
        assert not any("#" in link for link in page.links)

    def test_relative_and_absolute_hrefs(self):
        html = '<p><a href="sub/page.html">rel</a> <a href="https://other.example/x">abs</a></p>'
        page = extract_page(html, PAGE_URL)
        assert page.links == ["http://host/docs/sub/page.html", "https://other.example/x"]

    def test_title_from_title_tag(self):
        page = extract_page(DOCS_INDEX, PAGE_URL)
        assert page.title == "crewkit documentation"

    def test_title_falls_back_to_first_heading(self):
        html = "<body><h1>Only Heading</h1><p>text</p></body>"
        page = extract_page(html, PAGE_URL)
        assert page.title == "Only Heading"

    def test_entities_are_decoded(self):
        html = "<p>fish &amp; chips &gt; soup</p>"
        page = extract_page(html, PAGE_URL)
        assert page.text == "fish & chips > soup"
