"""Excel workbook generation for run reports"""

from datetime import datetime
from pathlib import Path

from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter


def _cell(value):
    if isinstance(value, (list, tuple)):
        return ', '.join(str(v) for v in value)
    if isinstance(value, dict):
        return str(value)
    return value


class ExcelOutput:
    """Summary, Assertions, Parameters and Trials sheets"""

    def __init__(self, output_dir):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.wb = Workbook()

        # Styles
        self.header_font = Font(bold=True, color="FFFFFF")
        self.header_fill = PatternFill(start_color="00bcd4", end_color="00bcd4", fill_type="solid")
        self.pass_font = Font(bold=True, color="2E7D32")
        self.fail_font = Font(bold=True, color="C62828")
        self.border = Border(
            left=Side(style='thin'),
            right=Side(style='thin'),
            top=Side(style='thin'),
            bottom=Side(style='thin')
        )

    def build(self, report):
        """Populate the workbook; returns it unsaved"""
        self.wb.remove(self.wb.active)
        results = report['results']

        self._create_summary_sheet(report)
        self._create_table_sheet("Assertions", ['name', 'value', 'threshold', 'passed'],
                                 results.get('assertions', []))
        self._create_table_sheet("Parameters", ['parameter', 'value'],
                                 [{'parameter': k, 'value': v} for k, v in report['params'].items()])
        rows = results.get('trials') or []
        if rows:
            columns = []
            for row in rows:
                columns.extend(key for key in row if key not in columns)
            self._create_table_sheet("Trials", columns, rows)
        return self.wb

    def generate(self, report):
        """Save the workbook under a timestamped name and return its path"""
        self.build(report)
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        command = report['command'].replace('-', '_')
        output_file = self.output_dir / f'quditsinglet_{command}_{timestamp}.xlsx'
        self.wb.save(output_file)
        return output_file

    def _write_header(self, ws, headers):
        ws.append(headers)
        for col in range(1, len(headers) + 1):
            cell = ws.cell(row=1, column=col)
            cell.font = self.header_font
            cell.fill = self.header_fill
            cell.alignment = Alignment(horizontal='center')
            cell.border = self.border

    def _create_table_sheet(self, title, columns, rows):
        ws = self.wb.create_sheet(title)
        self._write_header(ws, columns)
        for row in rows:
            ws.append([_cell(row.get(column)) for column in columns])
        if 'passed' in columns:
            verdict_col = columns.index('passed') + 1
            for r in range(2, ws.max_row + 1):
                cell = ws.cell(row=r, column=verdict_col)
                cell.font = self.pass_font if cell.value else self.fail_font
        self._adjust_column_widths(ws)

    def _create_summary_sheet(self, report):
        ws = self.wb.create_sheet("Summary")
        ws['A1'] = 'quditsinglet run report'
        ws['A1'].font = Font(bold=True, size=14, color="00bcd4")

        entries = [
            ('Command', report['command']),
            ('Verdict', 'PASS' if report['pass'] else 'FAIL'),
            ('Wall time (ms)', report['wall_time_ms']),
            ('Artifact version', report['artifact_version']),
            ('Report Generated', datetime.now().strftime('%Y-%m-%d %H:%M:%S')),
        ]
        for offset, (label, value) in enumerate(entries, start=3):
            ws.cell(row=offset, column=1, value=label).font = Font(bold=True)
            ws.cell(row=offset, column=2, value=value)
        ws['B4'].font = self.pass_font if report['pass'] else self.fail_font
        self._adjust_column_widths(ws)

    def _adjust_column_widths(self, worksheet):
        """Auto-adjust column widths"""
        for column in worksheet.columns:
            max_length = 0
            column_letter = get_column_letter(column[0].column)

            for cell in column:
                if cell.value is not None:
                    max_length = max(max_length, len(str(cell.value)))

            worksheet.column_dimensions[column_letter].width = min(max_length + 2, 60)
