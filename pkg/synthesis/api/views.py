from django.conf import settings
from rest_framework import permissions, status, viewsets
from rest_framework.response import Response
from rest_framework.views import APIView

from synthesis.benchmark import controller_from_values
from synthesis.cegis import Limits
from synthesis.models import SynthesisRun
from synthesis.reports import run_synthesis, run_verify
from .serializers import SynthesisRunSerializer, SynthesizeRequestSerializer, VerifyRequestSerializer


# ─────────────────────────────────────────────
# VERIFY View
# ─────────────────────────────────────────────

class VerifyView(APIView):
    """
    POST /api/v1/verify/
    Body: benchmark fields + { controller: {num, den, format?}, rounding?, steps? }
    Returns the verification report and stores it in the run history.
    """
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = VerifyRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response({'success': False, 'errors': serializer.errors}, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        spec = data['spec']
        c = data['controller']
        controller = controller_from_values(c['num'], c['den'], c['format'], data['rounding'])
        report = run_verify(spec, controller,
                            steps=data.get('steps', settings.SYNTHESIS['SIMULATION_STEPS']),
                            cancellation_tol=settings.SYNTHESIS['CANCELLATION_TOL'])
        run = SynthesisRun.record('verify', report, spec.name)
        return Response({'success': True, 'run_id': run.id, 'report': report})


# ─────────────────────────────────────────────
# SYNTHESIZE View
# ─────────────────────────────────────────────

class SynthesizeView(APIView):
    """
    POST /api/v1/synthesize/
    Body: benchmark fields + { engine, seed, max_iterations, max_precision, timeout, search_budget }
    """
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = SynthesizeRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response({'success': False, 'errors': serializer.errors}, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        spec = data['spec']
        limits = Limits.from_settings({
            'MAX_ITERATIONS': data.get('max_iterations'),
            'MAX_PRECISION': data.get('max_precision'),
            'TIMEOUT': data.get('timeout'),
            'SEARCH_BUDGET': data.get('search_budget'),
        })
        report = run_synthesis(spec, data['engine'], data['seed'], limits,
                               oracle_samples=settings.SYNTHESIS['ORACLE_SAMPLES'])
        run = SynthesisRun.record('synth', report, spec.name, report['engine'], data['seed'])
        return Response({'success': True, 'run_id': run.id, 'report': report})


# ─────────────────────────────────────────────
# RUN history (read-only)
# ─────────────────────────────────────────────

class SynthesisRunViewSet(viewsets.ReadOnlyModelViewSet):
    serializer_class = SynthesisRunSerializer
    permission_classes = [permissions.AllowAny]

    def get_queryset(self):
        return SynthesisRun.objects.all().order_by('-created_at', '-id')
