"""
Benchmark reports
Writes bench rows to an .xlsx workbook (one sheet per family) and to a
PDF with one pivot table per family: instances down, encodings across,
solve time in the cells.
"""

import logging

import openpyxl
from openpyxl.styles import Font
from openpyxl.utils import get_column_letter
from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER, TA_LEFT
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from .bench_runner import CSV_HEADER

logger = logging.getLogger(__name__)

TIMEOUT_MARK = "---"


def _by_family(records):
    families = {}
    for record in records:
        families.setdefault(record.family, []).append(record)
    return families


def write_workbook(records, path):
    wb = openpyxl.Workbook()
    wb.remove(wb.active)
    header = [*CSV_HEADER, "note"]
    for family, rows in _by_family(records).items():
        ws = wb.create_sheet(family[:31])
        ws.append(header)
        for cell in ws[1]:
            cell.font = Font(bold=True)
        for record in rows:
            ws.append(record.row())
        for col, name in enumerate(header, start=1):
            width = max([len(name)] + [len(str(ws.cell(row=r, column=col).value or "")) for r in range(2, ws.max_row + 1)])
            ws.column_dimensions[get_column_letter(col)].width = min(width + 2, 50)
        ws.freeze_panes = "A2"
    if not wb.sheetnames:
        wb.create_sheet("empty")
    wb.save(path)
    logger.info("wrote %d rows to %s", len(records), path)


def pivot(rows):
    """Rows per params (first-seen order), one column per encoding label."""
    encodings = list(dict.fromkeys(record.encoding for record in rows))
    table = {}
    for record in rows:
        cell = TIMEOUT_MARK if record.status == "unknown" else f"{record.time_s:.2f}"
        table.setdefault(record.params, {})[record.encoding] = cell
    data = [["params", *encodings]]
    for params, cells in table.items():
        data.append([params, *(cells.get(encoding, "") for encoding in encodings)])
    return data


def write_pdf_report(records, path, title="Benchmark results"):
    pdf_doc = SimpleDocTemplate(path, pagesize=A4, rightMargin=36, leftMargin=36, topMargin=36, bottomMargin=36)
    styles = getSampleStyleSheet()
    title_style = ParagraphStyle(
        "ReportTitle", parent=styles["Title"], fontSize=16, spaceAfter=12, textColor=colors.black, alignment=TA_CENTER
    )
    family_style = ParagraphStyle(
        "FamilyHeader", parent=styles["Heading1"], fontSize=14, spaceAfter=8, spaceBefore=12, textColor=colors.blue, alignment=TA_LEFT
    )

    content = [Paragraph(title, title_style), Spacer(1, 12)]
    families = _by_family(records)
    for family, rows in families.items():
        content.append(Paragraph(f"{family}: time in seconds ({TIMEOUT_MARK} = budget exhausted)", family_style))
        content.append(Spacer(1, 6))
        table = Table(pivot(rows))
        table.setStyle(
            TableStyle(
                [
                    ("BACKGROUND", (0, 0), (-1, 0), colors.grey),
                    ("TEXTCOLOR", (0, 0), (-1, 0), colors.whitesmoke),
                    ("ALIGN", (1, 0), (-1, -1), "RIGHT"),
                    ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
                    ("FONTSIZE", (0, 0), (-1, 0), 9),
                    ("BOTTOMPADDING", (0, 0), (-1, 0), 8),
                    ("BACKGROUND", (0, 1), (-1, -1), colors.beige),
                    ("FONTNAME", (0, 1), (-1, -1), "Helvetica"),
                    ("FONTSIZE", (0, 1), (-1, -1), 8),
                    ("GRID", (0, 0), (-1, -1), 0.5, colors.black),
                ]
            )
        )
        content.append(table)
        content.append(Spacer(1, 20))
    if not families:
        content.append(Paragraph("No benchmark rows.", styles["Normal"]))
    pdf_doc.build(content)
    logger.info("wrote %d tables to %s", len(families), path)
