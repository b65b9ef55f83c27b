"""HTML report generation"""

from datetime import datetime
from pathlib import Path

from jinja2 import Environment, FileSystemLoader

from utils.serialization import format_float


def _display(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ', '.join(_display(v) for v in value)
    if value is None:
        return '—'
    return str(value)


class HTMLOutput:
    """Render a RunReport into templates/report.html"""

    def __init__(self, output_dir):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

        template_dir = Path(__file__).parent.parent / 'templates'
        self.env = Environment(
            loader=FileSystemLoader(str(template_dir)),
            autoescape=True
        )
        self.env.filters['display'] = _display
        self.env.filters['exact'] = format_float

    def render(self, report):
        results = report['results']
        rows = results.get('trials') or []
        columns = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)

        template = self.env.get_template('report.html')
        return template.render(
            report=report,
            scalars={k: v for k, v in results.items()
                     if k not in ('assertions', 'trials') and not isinstance(v, dict)},
            assertions=results.get('assertions', []),
            columns=columns,
            rows=rows,
            stats=self._calculate_stats(results),
            timestamp=datetime.now().strftime('%Y-%m-%d %H:%M:%S'),
        )

    def generate(self, report):
        """Write the report to a timestamped file and return its path"""
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        command = report['command'].replace('-', '_')
        output_file = self.output_dir / f'quditsinglet_{command}_{timestamp}.html'
        with open(output_file, 'w', encoding='utf-8') as f:
            f.write(self.render(report))
        return output_file

    def _calculate_stats(self, results):
        assertions = results.get('assertions', [])
        passed = sum(1 for a in assertions if a['passed'])
        return {
            'checks': len(assertions),
            'passed': passed,
            'failed': len(assertions) - passed,
            'trials': len(results.get('trials') or []),
        }
