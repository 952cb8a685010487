import logging
from pathlib import Path

from fpdf import FPDF

import config
from engine.payoff import classify, payoff_analytic

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = f"%.{config.CSV_DIGITS}g"


class PDFReport(FPDF):
    def header(self):
        self.set_font('Helvetica', 'B', 16)
        self.cell(0, 10, "Reduced Coin Operator Analysis", new_x="LMARGIN", new_y="NEXT", align='C')
        self.ln(5)

    def footer(self):
        self.set_y(-15)
        self.set_font('Helvetica', 'I', 8)
        self.cell(0, 10, f'Page {self.page_no()}', align='C')


def write_csv(frame, path, index=False):
    """
    Writes a DataFrame with 12 significant digits.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=index, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def write_text(text, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def _fmt(value, digits=config.DISPLAY_DIGITS):
    if value is None:
        return "-"
    if isinstance(value, complex):
        sign = '+' if value.imag >= 0 else '-'
        return f"{value.real:.{digits}f}{sign}{abs(value.imag):.{digits}f}i"
    return f"{value:.{digits}f}"


def _format_vector(state, digits=config.DISPLAY_DIGITS):
    return f"{_fmt(state.s0, digits)}|0> + ({_fmt(state.s1, digits)})|1>"


def analysis_lines(analyses, observable_name, omega, home=None):
    """Plain-text lines shared by the markdown and PDF reports."""
    sections = []
    for i, a in enumerate(analyses):
        m = a.o_matrix
        lines = [
            f"Walk W{i + 1}",
            f"  o = [[{_fmt(m[0, 0].real)}, {_fmt(complex(m[0, 1]))}], [{_fmt(complex(m[1, 0]))}, {_fmt(m[1, 1].real)}]]",
        ]
        if a.degenerate:
            lines.append(f"  degenerate: o_max = o_min = {_fmt(a.o_max)}, every home pays {_fmt(a.payoff_constant)}")
        else:
            lines.append(f"  o_max = {_fmt(a.o_max)}, v_max = {_format_vector(a.v_max)}")
            lines.append(f"  o_min = {_fmt(a.o_min)}, v_min = {_format_vector(a.v_min)}")
            lines.append(f"  Omega = {_fmt(a.omega_cap)}")
        if home is not None:
            lines.append(f"  payoff = {_fmt(payoff_analytic(a, home))} ({classify(a, home).name})")
        sections.append(lines)
    header = [f"Observable: {observable_name}", f"Target payoff: {omega:g}"]
    return header, sections


def generate_markdown_report(analyses, observable_name, omega, home=None):
    """
    Generates a Markdown report of the reduced coin operators of a set of walks.

    Args:
        analyses (list[CoinObservableAnalysis]): One analysis per walk.
        observable_name (str): Observable label.
        omega (float): Target payoff.
        home (CoinLike, optional): Home state whose payoffs are listed.

    Returns:
        str: The complete Markdown string.
    """
    if not analyses:
        return "# Reduced Coin Operator Analysis\n\nNo data available."

    header, sections = analysis_lines(analyses, observable_name, omega, home)
    lines = ["# Reduced Coin Operator Analysis", ""]
    lines.extend(f"**{h.split(':')[0]}:**{h.split(':', 1)[1]}" for h in header)
    lines.append("---")
    for section in sections:
        lines.append(f"### {section[0]}")
        lines.append("```")
        lines.extend(line.strip() for line in section[1:])
        lines.append("```")
    return "\n".join(lines)


def generate_pdf_report(analyses, observable_name, omega, home=None):
    """
    Generates the analysis report as PDF.

    Returns:
        bytes: The PDF content.
    """
    pdf = PDFReport()
    pdf.add_page()
    pdf.set_font("Helvetica", size=12)

    if not analyses:
        pdf.cell(0, 10, "No data available.", new_x="LMARGIN", new_y="NEXT")
        return bytes(pdf.output())

    header, sections = analysis_lines(analyses, observable_name, omega, home)
    for h in header:
        pdf.cell(0, 8, h, new_x="LMARGIN", new_y="NEXT")
    pdf.ln(4)

    for section in sections:
        pdf.set_font("Helvetica", 'B', 12)
        pdf.cell(0, 10, section[0], new_x="LMARGIN", new_y="NEXT")
        pdf.set_font("Courier", size=9)
        for line in section[1:]:
            pdf.multi_cell(0, 5, line.strip(), new_x="LMARGIN", new_y="NEXT")
        pdf.ln(3)
        pdf.line(10, pdf.get_y(), 200, pdf.get_y())
        pdf.ln(3)

    return bytes(pdf.output())
