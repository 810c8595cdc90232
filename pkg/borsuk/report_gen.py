# borsuk/report_gen.py
"""
Report emitters for verification runs and threshold scans: markdown, CSV
(pandas) and PDF (reportlab).

- Rows come in as plain dicts so this module does not depend on the
  orchestration layer.
- PDFs are built with reportlab's invariant mode: no creation date and a
  fixed document id, so the same input gives the same bytes.
- User-facing strings go through _p(), which escapes them before they reach
  reportlab's Paragraph markup parser.
"""

import html
import io
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import mm
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from utils import markdown_table

from .bound_engine import ThresholdReport

# Constants
PAGE_MARGIN_MM = 18
DEFAULT_FONT = "Helvetica"
MAX_DETAIL_CHARS = 300

THRESHOLD_COLUMNS = ["p", "n", "α(n)", "2^(n−2)", "parts_needed", "n²+1", "verdict"]
CHECK_COLUMNS = ["check", "status", "detail"]


# ---------------------------
# Helpers
# ---------------------------

def _truncate_text(s: Optional[str], max_chars: int = MAX_DETAIL_CHARS) -> str:
    """Collapse whitespace and cut long cell text at a space near the limit."""
    if s is None:
        return ""
    text = " ".join(str(s).split())
    if len(text) <= max_chars:
        return text
    idx = text.rfind(" ", 0, max_chars)
    if idx == -1 or idx < int(max_chars * 0.6):
        idx = max_chars
    return text[:idx].rstrip() + "..."


def _get_styles():
    styles = getSampleStyleSheet()
    normal = ParagraphStyle("NormalWrap", parent=styles["Normal"], fontName=DEFAULT_FONT, fontSize=9, leading=12, wordWrap="CJK")
    h1 = ParagraphStyle("H1", parent=styles["Heading1"], alignment=1, fontName=DEFAULT_FONT, fontSize=18, leading=22)
    h2 = ParagraphStyle("H2", parent=styles["Heading2"], fontName=DEFAULT_FONT, fontSize=14, leading=18)
    small = ParagraphStyle("Small", parent=styles["Normal"], fontName=DEFAULT_FONT, fontSize=8, leading=10)
    mono = ParagraphStyle("Mono", parent=styles["Normal"], fontName="Courier", fontSize=8, leading=10, wordWrap="CJK")
    return {"normal": normal, "h1": h1, "h2": h2, "small": small, "mono": mono}


def _status_hex(status: str) -> str:
    mapping = {"pass": "#2E7D32", "fail": "#C62828", "skip": "#EF6C00", "true": "#C62828", "false": "#424242"}
    return mapping.get(str(status).lower(), "#424242")


def _content_width(doc):
    page_w, _ = doc.pagesize
    return page_w - doc.leftMargin - doc.rightMargin


def _p(text: Any, style, allow_markup: bool = False) -> Paragraph:
    """
    Paragraph with escaped content. allow_markup=True only for strings built
    here with small inline tags (<b>, <font>).
    """
    s = "" if text is None else str(text)
    if not allow_markup:
        s = html.escape(s)
    return Paragraph(s.replace("\n", "<br/>"), style)


def _new_doc(buffer) -> SimpleDocTemplate:
    return SimpleDocTemplate(
        buffer,
        pagesize=A4,
        rightMargin=PAGE_MARGIN_MM * mm,
        leftMargin=PAGE_MARGIN_MM * mm,
        topMargin=PAGE_MARGIN_MM * mm,
        bottomMargin=PAGE_MARGIN_MM * mm,
        invariant=1,
        title="Borsuk verification report",
        author="",
        creator="borsuk-lab",
    )


def _metadata_table(metadata: Dict[str, Any], styles, doc) -> Table:
    lines = [[Paragraph(f"<b>{html.escape(str(k))}</b>", styles["small"]), _p(v, styles["small"])] for k, v in metadata.items()]
    tbl = Table(lines, colWidths=[40 * mm, _content_width(doc) - 40 * mm])
    tbl.setStyle(TableStyle([
        ("VALIGN", (0, 0), (-1, -1), "TOP"),
        ("LEFTPADDING", (0, 0), (-1, -1), 4),
        ("RIGHTPADDING", (0, 0), (-1, -1), 4),
        ("LINEBELOW", (0, 0), (-1, 0), 0.25, colors.lightgrey),
    ]))
    return tbl


def _grid(data, col_widths) -> Table:
    tbl = Table(data, colWidths=col_widths, repeatRows=1)
    tbl.setStyle(TableStyle([
        ("GRID", (0, 0), (-1, -1), 0.25, colors.lightgrey),
        ("BACKGROUND", (0, 0), (-1, 0), colors.HexColor("#F0F0F0")),
        ("VALIGN", (0, 0), (-1, -1), "TOP"),
    ]))
    return tbl


# ---------------------------
# Tables
# ---------------------------

def threshold_rows(reports: Sequence[ThresholdReport]) -> List[List[str]]:
    return [
        [str(r.p), str(r.n), str(r.alpha_n), str(r.m_size), str(r.parts_needed), str(r.borsuk_bound),
         "counterexample" if r.counterexample else "no"]
        for r in reports
    ]


def threshold_frame(reports: Sequence[ThresholdReport]) -> pd.DataFrame:
    return pd.DataFrame(threshold_rows(reports), columns=THRESHOLD_COLUMNS)


def checks_frame(checks: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame([[c["check"], c["status"], c["detail"]] for c in checks], columns=CHECK_COLUMNS)


def frame_to_csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False)


def final_line(report: ThresholdReport) -> str:
    return (f"p* = {report.p}: n = {report.n}, f(M) in dimension d = n² = {report.dimension} "
            f"needs at least {report.parts_needed} > d + 1 = {report.borsuk_bound} parts of smaller diameter "
            f"(reduced dimension {report.reduced_dimension})")


def render_threshold_markdown(reports: Sequence[ThresholdReport]) -> str:
    out = "# Threshold scan\n\n" + markdown_table(THRESHOLD_COLUMNS, threshold_rows(reports))
    if reports and reports[-1].counterexample:
        out += "\n" + final_line(reports[-1]) + "\n"
    return out


def render_checks_markdown(title: str, metadata: Dict[str, Any], checks: Sequence[Dict[str, Any]]) -> str:
    head = f"# {title}\n\n" + "".join(f"- **{k}**: {v}\n" for k, v in metadata.items()) + "\n"
    return head + markdown_table(CHECK_COLUMNS, [[c["check"], c["status"], c["detail"]] for c in checks])


# ---------------------------
# PDF Generators
# ---------------------------

def generate_verification_pdf(title: str, metadata: Dict[str, Any], checks: Sequence[Dict[str, Any]]) -> bytes:
    buffer = io.BytesIO()
    doc = _new_doc(buffer)
    styles = _get_styles()
    story = [Paragraph(html.escape(title), styles["h1"]), Spacer(1, 6), _metadata_table(metadata, styles, doc), Spacer(1, 12)]

    story.append(Paragraph("Checks", styles["h2"]))
    data = [[_p(h, styles["small"]) for h in CHECK_COLUMNS]]
    for c in checks:
        status = str(c["status"])
        data.append([
            _p(c["check"], styles["mono"]),
            _p(f'<font color="{_status_hex(status)}"><b>{html.escape(status)}</b></font>', styles["small"], allow_markup=True),
            _p(_truncate_text(c["detail"]), styles["small"]),
        ])
    width = _content_width(doc)
    story.append(_grid(data, [45 * mm, 18 * mm, width - 63 * mm]))
    doc.build(story)
    return buffer.getvalue()


def generate_threshold_pdf(metadata: Dict[str, Any], reports: Sequence[ThresholdReport]) -> bytes:
    buffer = io.BytesIO()
    doc = _new_doc(buffer)
    styles = _get_styles()
    story = [Paragraph("Threshold scan", styles["h1"]), Spacer(1, 6), _metadata_table(metadata, styles, doc), Spacer(1, 12)]

    data = [[_p(h, styles["small"]) for h in THRESHOLD_COLUMNS]]
    for row, r in zip(threshold_rows(reports), reports):
        verdict = row[-1]
        cells = [_p(v, styles["mono"]) for v in row[:-1]]
        cells.append(_p(f'<font color="{_status_hex(str(r.counterexample))}">{html.escape(verdict)}</font>', styles["small"], allow_markup=True))
        data.append(cells)
    width = _content_width(doc)
    story.append(_grid(data, [10 * mm, 12 * mm] + [(width - 52 * mm) / 4] * 4 + [30 * mm]))
    if reports and reports[-1].counterexample:
        story.append(Spacer(1, 10))
        story.append(_p(final_line(reports[-1]), styles["normal"]))
    doc.build(story)
    return buffer.getvalue()
