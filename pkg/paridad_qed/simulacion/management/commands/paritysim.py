"""
Comando principal del simulador de medición de paridad.

Uso:
    python manage.py paritysim <subcomando> --config ARCHIVO [--out ARCHIVO]
                               [--seed N] [--format text|json] [--dump-config]

Subcomandos:
- amplitudes: tabla de amplitudes condicionales zeta, xi y beta
- rates: reporte de decoherencia (DecoherenceReport)
- sweep: barrido de un parámetro con los productos nu*t_m (CSV / XLSX)
- optimize: r3 óptimo, cerrado y opcionalmente numérico
- transient: serie temporal de beta para los cuatro estados
- lindblad: comparación de la eliminación adiabática
- homodyne: tasa de error de discriminación homodina
- validate: condición de débil excitación

Códigos de salida: 0 éxito, 2 error de validación, 3 error numérico.
"""

import math

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from simulacion import (decoherence, homodyne, lindblad, optimizer, serializers,
                        steady_state, transient)
from simulacion.conf import ajuste
from simulacion.configuracion import dump_config, read_config
from simulacion.core import ESTADOS, check_weak_driving
from simulacion.excepciones import ErrorNumerico
from simulacion.exportar import escribir_atomico, exportar_xlsx, formatear, tabla_csv

SUBCOMANDOS = {
    'amplitudes': 'Amplitudes condicionales de la red',
    'rates': 'Tiempo de medición y tasas de decoherencia',
    'sweep': 'Barrido de un parámetro (productos nu*t_m)',
    'optimize': 'Reflectividad óptima del lazo',
    'transient': 'Transitorio del lazo en la grilla de vueltas',
    'lindblad': 'Ecuación maestra completa contra la reducida',
    'homodyne': 'Experimento de discriminación homodina',
    'validate': 'Condición de débil excitación',
}


def _etiqueta(estado):
    return f'{estado[0]}{estado[1]}'


def _texto(pares):
    return ''.join(f'{clave}={formatear(valor)}\n' for clave, valor in pares)


class Command(BaseCommand):
    help = 'Simulador de la medición de paridad de dos qubits en cavidades con lazo cerrado'

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest='subcomando', required=True, title='subcomandos')
        for nombre, ayuda in SUBCOMANDOS.items():
            p = sub.add_parser(nombre, help=ayuda)
            p.add_argument('--config', type=str, default=None, help='Archivo de configuración key = value')
            p.add_argument('--out', type=str, default=None, help='Archivo de salida (por defecto stdout)')
            p.add_argument('--seed', type=int, default=None, help='Semilla (sobrescribe la del archivo)')
            p.add_argument('--format', type=str, default='text', choices=['text', 'json'],
                           help='Formato de los reportes')
            p.add_argument('--dump-config', action='store_true',
                           help='Imprime la configuración resuelta y termina')
            getattr(self, f'_argumentos_{nombre}', lambda _: None)(p)

    def _argumentos_rates(self, p):
        p.add_argument('--closed-form', action='store_true',
                       help='Usa las expresiones cerradas del caso de la configuración')

    def _argumentos_sweep(self, p):
        p.add_argument('--case', type=str, choices=list(optimizer.CASOS), default=None)
        p.add_argument('--var', type=str, choices=list(optimizer.VARIABLES), default='r3')
        p.add_argument('--from', dest='desde', type=float, default=0.0)
        p.add_argument('--to', dest='hasta', type=float, default=0.95)
        p.add_argument('--steps', type=int, default=96)
        p.add_argument('--doc', type=float, default=None, help='Cociente D/C (caso no resonante)')
        p.add_argument('--C', dest='C', type=float, default=None)
        p.add_argument('--r3', type=float, default=None)
        p.add_argument('--eta3', type=float, default=None)
        p.add_argument('--alpha2', type=float, default=None)
        p.add_argument('--xlsx', type=str, default=None, help='Exporta además a Excel con gráfico')

    def _argumentos_optimize(self, p):
        p.add_argument('--case', type=str, choices=list(optimizer.CASOS), default=None)
        p.add_argument('--C', dest='C', type=float, default=None)
        p.add_argument('--doc', type=float, default=None)
        p.add_argument('--eta3', type=float, default=None)
        p.add_argument('--numeric', action='store_true', help='Agrega el minimizador numérico')
        p.add_argument('--margin', type=float, default=None, help='Margen M de la restricción')

    def _argumentos_transient(self, p):
        p.add_argument('--steps', type=int, default=200)
        p.add_argument('--pulse', type=int, default=None, help='Entrada encendida solo N pasos')
        p.add_argument('--naive', action='store_true', help='Usa el propagador por saltos de campo')
        p.add_argument('--delay', type=int, default=0, help='Retardo del lazo T en vueltas (desplaza t)')

    def _argumentos_lindblad(self, p):
        p.add_argument('--t-end', dest='t_end', type=float, default=None)
        p.add_argument('--xi2', type=float, default=0.01, help='|xi0|^2 inicial')
        p.add_argument('--cutoff', type=int, default=None)
        p.add_argument('--h', type=float, default=None)

    def _argumentos_homodyne(self, p):
        p.add_argument('--trajectories', type=int, default=10000)
        p.add_argument('--horizon', type=float, default=1.0, help='Horizonte en múltiplos de t_m')
        p.add_argument('--theta', type=float, default=0.0)
        p.add_argument('--pair', type=str, choices=['00', '11'], default=None)
        p.add_argument('--workers', type=int, default=None)

    # ========== EJECUCIÓN ==========

    def handle(self, *args, **options):
        subcomando = options['subcomando']
        try:
            run = read_config(options['config']) if options.get('config') else None
            if options.get('dump_config'):
                if run is None:
                    raise CommandError('--dump-config necesita --config.', returncode=2)
                self._emitir(dump_config(run), options)
                return
            getattr(self, f'_{subcomando}')(run, options)
        except ValidationError as e:
            raise CommandError('; '.join(e.messages), returncode=2)
        except ErrorNumerico as e:
            raise CommandError(f'Error numérico: {e}', returncode=3)

    def _emitir(self, texto, options):
        if options.get('out'):
            escribir_atomico(options['out'], texto)
            self.stderr.write(self.style.SUCCESS(f'Resultado escrito en {options["out"]}'))
        else:
            self.stdout.write(texto, ending='')

    def _requiere(self, run):
        if run is None:
            raise CommandError('Este subcomando necesita --config.', returncode=2)
        return run

    def _amplitudes(self, run, options):
        sistema = self._requiere(run).system
        amps = steady_state.solve_loop(sistema)
        if options['format'] == 'json':
            datos = [
                dict(state=_etiqueta(e), **serializers.AmplitudeSetSerializer(amps[e]).data)
                for e in ESTADOS
            ]
            from rest_framework.renderers import JSONRenderer
            self._emitir(JSONRenderer().render(datos).decode('utf-8') + '\n', options)
            return
        campos = ['zeta1', 'zeta2', 'zeta3', 'zeta4', 'zeta5', 'xi1', 'xi2', 'beta']
        encabezado = ['state'] + [f'{c}_{p}' for c in campos for p in ('re', 'im')] + ['photons1', 'photons2']
        filas = []
        for e in ESTADOS:
            conjunto = amps[e]
            fila = [_etiqueta(e)]
            for c in campos:
                z = getattr(conjunto, c)
                fila += [z.real, z.imag]
            fila += [steady_state.conditional_cavity_photon_number(amps, q, *e) for q in (1, 2)]
            filas.append(fila)
        self._emitir(tabla_csv(encabezado, filas), options)

    def _rates(self, run, options):
        run = self._requiere(run)
        sistema = run.system
        if options.get('closed_form'):
            if not sistema.identical_cavities:
                raise CommandError('Las formas cerradas suponen dos cavidades idénticas.', returncode=2)
            v = run.values
            alpha2 = v['alpha'] ** 2
            if run.resonant:
                reporte = decoherence.closed_form_resonant(v['C1'], v['r3'], v['eta3'], alpha2)
            else:
                reporte = decoherence.closed_form_nonresonant(v['C1'], v['D1'], v['r3'], v['eta3'], alpha2)
        else:
            reporte = decoherence.decoherence_report(steady_state.solve_loop(sistema), sistema)
        if options['format'] == 'json':
            self._emitir(serializers.a_json(serializers.DecoherenceReportSerializer, reporte) + '\n', options)
            return
        self._emitir(_texto([
            ('t_m', reporte.t_m),
            ('t_m00', reporte.t_m00),
            ('t_m11', reporte.t_m11),
            ('nu_odd_se_tm', reporte.odd_se_products),
            ('nu_even_se_tm', reporte.even_se_products),
            ('nu_odd_loss_tm', reporte.nu_odd_loss * reporte.t_m),
            ('nu_even_loss_tm', reporte.nu_even_loss * reporte.t_m),
            ('odd_exponent', reporte.exponent('odd')),
            ('even_exponent', reporte.exponent('even')),
            ('loop_importance', reporte.loop_importance),
            ('avisos', reporte.avisos),
        ]), options)

    def _fijos(self, run, options):
        fijos = {}
        if run is not None:
            v = run.values
            fijos = {'C': v['C1'], 'r3': v['r3'], 'eta3': v['eta3'], 'alpha2': v['alpha'] ** 2}
            if v['D1'] != 0:
                fijos['doc'] = v['D1'] / v['C1']
        for clave in ('C', 'doc', 'r3', 'eta3', 'alpha2'):
            if options.get(clave) is not None:
                fijos[clave] = options[clave]
        return fijos

    def _caso(self, run, options):
        if options.get('case'):
            return options['case']
        return run.case if run is not None else 'nonresonant'

    def _sweep(self, run, options):
        spec = optimizer.SweepSpec(
            variable=options['var'],
            lo=options['desde'],
            hi=options['hasta'],
            steps=options['steps'],
            case=self._caso(run, options),
            fixed=self._fijos(run, options),
        )
        filas = optimizer.run_sweep(spec)
        encabezado = [spec.variable] + list(optimizer.COLUMNAS) + ['flags']
        tabla = [
            [f.value] + [getattr(f, c) for c in optimizer.COLUMNAS] + [';'.join(f.flags)]
            for f in filas
        ]
        if options.get('xlsx'):
            motor = exportar_xlsx(encabezado, tabla, options['xlsx'], titulo='Barrido',
                                  series=range(1, len(optimizer.COLUMNAS) + 1))
            self.stderr.write(self.style.SUCCESS(f'Excel exportado con {motor}: {options["xlsx"]}'))
        self._emitir(tabla_csv(encabezado, tabla), options)

    def _optimize(self, run, options):
        caso = self._caso(run, options)
        fijos = self._fijos(run, options)
        if 'C' not in fijos:
            raise CommandError('optimize necesita --C o --config.', returncode=2)
        eta3 = fijos.get('eta3', 1.0)
        C = fijos['C']
        if caso == 'resonant':
            r3 = optimizer.r3_opt_resonant(C, eta3)
            pares = [('case', caso), ('C', C), ('eta3', eta3)]
        else:
            D = fijos.get('doc', 1.0) * C
            F = complex(D, C) / complex(D, -C)
            re_f2 = float(np.clip((F * F).real, -1.0, 1.0))
            r3 = optimizer.r3_opt_nonresonant(re_f2, eta3)
            pares = [('case', caso), ('C', C), ('D', D), ('re_F2', re_f2), ('eta3', eta3)]

        numerico = None
        if options.get('numeric'):
            sistema = self._requiere(run).system
            numerico = optimizer.minimize_r3_numeric(sistema, constraint_margin=options.get('margin'))

        if options['format'] == 'json':
            extra = {'r3_opt': r3, 'case': caso}
            datos = numerico if numerico is not None else optimizer.R3Result(r3, math.nan, False, 1.0)
            self._emitir(serializers.a_json(serializers.R3ResultSerializer, datos, **extra) + '\n', options)
            return
        lineas = [f'r3_opt={r3:.6f}'] + [f'{k}={formatear(v)}' for k, v in pares]
        if numerico is not None:
            lineas += [
                f'r3_numeric={numerico.r3:.6f}',
                f'objective={formatear(numerico.value)}',
                f'constraint_active={formatear(numerico.constraint_active)}',
                f'r_max={formatear(numerico.r_max)}',
                f'unimodal={formatear(numerico.unimodal)}',
            ]
        self._emitir('\n'.join(lineas) + '\n', options)

    def _transient(self, run, options):
        sistema = self._requiere(run).system
        n = options['steps']
        alpha = np.full(n, sistema.loop.alpha, dtype=complex)
        if options.get('pulse') is not None:
            alpha[options['pulse']:] = 0.0
        propagar = transient.propagate_naive_network if options.get('naive') else transient.propagate_closed_loop
        traza = propagar(sistema, alpha, n, delay_offset=options.get('delay') or 0)
        encabezado = ['n', 't', 'alpha_re', 'alpha_im']
        for e in ESTADOS:
            encabezado += [f'beta{_etiqueta(e)}_re', f'beta{_etiqueta(e)}_im']
        tiempos = traza.times()
        filas = []
        for k in range(n):
            fila = [k, tiempos[k], traza.alpha[k].real, traza.alpha[k].imag]
            for e in ESTADOS:
                fila += [traza.beta[e][k].real, traza.beta[e][k].imag]
            filas.append(fila)
        self._emitir(tabla_csv(encabezado, filas), options)

    def _lindblad(self, run, options):
        sistema = self._requiere(run).system
        cavidad = sistema.cavity1
        params = lindblad.LightAtomParams.from_cavity(cavidad)
        config = lindblad.IntegratorConfig(cutoff=options.get('cutoff'), h=options.get('h'))
        t_end = options['t_end'] if options.get('t_end') is not None else cavidad.tau
        reporte = lindblad.compare_elimination(params, math.sqrt(options['xi2']), t_end, config)
        if options['format'] == 'json':
            self._emitir(serializers.a_json(serializers.EliminationReportSerializer, reporte) + '\n', options)
            return
        self._emitir(_texto([
            ('condition_ratio', reporte.condition_ratio),
            ('field_deviation', reporte.field_deviation),
            ('population_deviation', reporte.population_deviation),
            ('purity_deviation', reporte.purity_deviation),
            ('max_excited', reporte.max_excited),
            ('cutoff', reporte.cutoff),
            ('steps', reporte.steps),
        ]), options)

    def _homodyne(self, run, options):
        run = self._requiere(run)
        amps = steady_state.solve_loop(run.system)
        tiempos = decoherence.measurement_time(amps)
        par = options.get('pair') or ('11' if tiempos.t_m11 >= tiempos.t_m00 else '00')
        beta1 = amps.beta((1, 0))
        beta2 = amps.beta((int(par[0]), int(par[1])))
        semilla = options['seed'] if options.get('seed') is not None else (run.seed or 0)
        resultado = homodyne.discrimination_experiment(
            beta1, beta2, options['theta'], options['trajectories'], semilla,
            horizon_factor=options['horizon'],
            workers=options.get('workers') or ajuste('THREADS'),
        )
        if options['format'] == 'json':
            self._emitir(serializers.a_json(serializers.DiscriminationResultSerializer, resultado,
                                            pair=par, seed=semilla) + '\n', options)
            return
        self._emitir(_texto([
            ('pair', par),
            ('seed', semilla),
            ('t_m', resultado.t_m),
            ('horizon', resultado.horizon),
            ('error_rate', resultado.error_rate),
            ('expected_error_rate', resultado.expected_error_rate),
            ('standard_error', resultado.standard_error),
            ('n_traj', resultado.n_traj),
        ]), options)

    def _validate(self, run, options):
        sistema = self._requiere(run).system
        reporte = check_weak_driving(sistema, steady_state.solve_loop(sistema))
        if options['format'] == 'json':
            self._emitir(serializers.a_json(serializers.ValidityReportSerializer, reporte) + '\n', options)
        else:
            encabezado = ['cavity', 'partner_state', 'photon_factor', 'atom_factor', 'loop_factor',
                          'product', 'passes', 'loop_denominator', 'constraint_bound', 'constraint_ok']
            filas = [[getattr(e, c) for c in encabezado] for e in reporte.entries]
            self._emitir(tabla_csv(encabezado, filas), options)
        if not (reporte.passes and reporte.constraint_ok):
            raise CommandError(
                f'Condición de débil excitación violada (producto máximo {reporte.max_product:.3g}, '
                f'cota {reporte.threshold:g}).',
                returncode=2,
            )
        self.stderr.write(self.style.SUCCESS('Condición de débil excitación satisfecha.'))
