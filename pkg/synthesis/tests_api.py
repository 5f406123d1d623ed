from rest_framework import status
from rest_framework.test import APITestCase

from synthesis.models import SynthesisRun

CRUISE = {
    'name': 'cruise_control',
    'domain': 'z',
    'num': ['0.0264'],
    'den': ['1', '-0.9998'],
    'sample_time': '0.2',
    'controller_format': '4,16',
    'controller_orders': [2, 2],
}
FINAL = {'num': ['11.035202', '5.846100', '4.901855'], 'den': ['1.097901', '0.063110', '0.128357']}
QUANTIZED = {'num': ['2.72', '-4.153', '1.896'], 'den': ['1', '-1.843994140625', '0.8496']}


class SynthesisAPITests(APITestCase):
    def test_verify_stable_controller(self):
        response = self.client.post('/api/v1/verify/', {**CRUISE, 'controller': FINAL, 'steps': 100}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data['success'])
        report = response.data['report']
        self.assertEqual(report['verdict'], 'Stable')
        self.assertEqual(report['trace']['steps'], 100)
        self.assertEqual(SynthesisRun.objects.count(), 1)
        self.assertEqual(SynthesisRun.objects.get().id, response.data['run_id'])

    def test_verify_quantized_controller_is_unstable(self):
        response = self.client.post('/api/v1/verify/', {**CRUISE, 'controller': QUANTIZED}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        report = response.data['report']
        self.assertEqual(report['verdict'], 'Unstable')
        self.assertGreater(report['max_root_modulus'], 1)
        self.assertIsNotNone(report['trace']['diverged_at'])

    def test_verify_rejects_controller_outside_format(self):
        controller = {'num': ['40'], 'den': ['1']}
        response = self.client.post('/api/v1/verify/', {**CRUISE, 'controller': controller}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertFalse(response.data['success'])
        self.assertIn('controller', response.data['errors'])
        self.assertEqual(SynthesisRun.objects.count(), 0)

    def test_verify_rejects_coefficient_that_rounds_out_of_format(self):
        controller = {'num': ['15.99999999'], 'den': ['1']}
        body = {**CRUISE, 'controller': controller, 'rounding': 'nearest'}
        response = self.client.post('/api/v1/verify/', body, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('controller', response.data['errors'])

    def test_negative_uncertainty(self):
        data = {**CRUISE, 'delta': ['0', '-1', '0'], 'controller': FINAL}
        response = self.client.post('/api/v1/verify/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('delta', response.data['errors'])

    def test_improper_plant(self):
        data = {**CRUISE, 'num': ['1', '0', '0'], 'controller': FINAL}
        response = self.client.post('/api/v1/verify/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('num', response.data['errors'])

    def test_s_domain_needs_sample_time(self):
        data = {**CRUISE, 'domain': 's', 'sample_time': None, 'controller': FINAL}
        response = self.client.post('/api/v1/verify/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('sample_time', response.data['errors'])

    def test_synthesize(self):
        response = self.client.post('/api/v1/synthesize/', {**CRUISE, 'seed': 3}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        report = response.data['report']
        self.assertEqual(report['outcome'], 'Success')
        self.assertEqual(report['engine'], 'two-stage')
        self.assertTrue(report['oracle']['passed'])
        run = SynthesisRun.objects.get(id=response.data['run_id'])
        self.assertEqual(run.seed, 3)
        self.assertTrue(run.succeeded)

    def test_synthesize_iteration_limit(self):
        response = self.client.post('/api/v1/synthesize/', {**CRUISE, 'max_iterations': 0}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['report']['reason'], 'IterationLimit')
        self.assertFalse(SynthesisRun.objects.get().succeeded)

    def test_synthesize_rejects_unknown_engine(self):
        response = self.client.post('/api/v1/synthesize/', {**CRUISE, 'engine': 'three'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('engine', response.data['errors'])

    def test_run_history(self):
        self.client.post('/api/v1/verify/', {**CRUISE, 'controller': FINAL, 'steps': 10}, format='json')
        self.client.post('/api/v1/verify/', {**CRUISE, 'controller': QUANTIZED, 'steps': 10}, format='json')
        response = self.client.get('/api/v1/runs/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 2)
        # newest first
        self.assertEqual(response.data[0]['outcome'], 'Unstable')
        self.assertFalse(response.data[0]['succeeded'])

        response = self.client.get(f"/api/v1/runs/{response.data[1]['id']}/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['kind'], 'verify')
        self.assertEqual(response.data['report']['verdict'], 'Stable')

    def test_runs_are_read_only(self):
        response = self.client.post('/api/v1/runs/', {'kind': 'verify'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)
