package com.example.automotiveintentexample;

import android.app.Service;
import android.car.Car;
import android.car.CarInfoManager;
import android.content.Intent;
import android.os.IBinder;
import android.util.Log;
import androidx.localbroadcastmanager.content.LocalBroadcastManager;

public class BroadcastService extends Service {
    private static final String TAG = "BroadcastService";
    private static final int MAX_CACHED = 16;

    private Car car;
    private String key = "vehicle";
    private String value = "info";
    private boolean verbose;
    private int createdCount;

    @Override
    public void onCreate() {
        super.onCreate();
        car = Car.createCar(this);
        car.connect();
    }

    @Override
    public int onStartCommand(Intent start, int flags, int startId) {
        if (car == null) {
            Log.w(TAG, "car service not available");
            return START_NOT_STICKY;
        }
        broadcastIntent();
        return START_STICKY;
    }

    @Override
    public IBinder onBind(Intent bound) {
        return null;
    }

    private String describe(String label, int count) {
        StringBuilder builder = new StringBuilder(label);
        builder.append(": ");
        builder.append(count);
        return builder.toString();
    }

    private boolean withinLimit(int count) {
        return count < MAX_CACHED;
    }



























































    private Intent createIntent(String key, String value) {
        Log.d(TAG, "createIntent");

        Intent intent = new Intent();
        intent.setAction("com.example.automotiveintentexample.broadcast");
        intent.putExtra(key, value);
        if (this.verbose) {
            Log.v(TAG, "payload key: " + key);
        }
        long createdAt = System.currentTimeMillis();
        this.createdCount++;
        if (!withinLimit(createdCount)) {
            Log.w(TAG, describe("created", createdCount));
        }
        Log.d(TAG, "created at " + createdAt);

        // extras are filled in by the caller
        return intent;
    }

    private void logState(String state) {
        if (verbose) {
            Log.v(TAG, state);
        }
    }

    private int cachedCount() {
        int remaining = MAX_CACHED - createdCount;
        if (remaining < 0) {
            remaining = 0;
        }
        return remaining;
    }

    public void setVerbose(boolean enabled) {
        this.verbose = enabled;
        logState("verbose=" + enabled);
    }

























    private void broadcastIntent() {
        Intent intent = createIntent(key, value);
        intent.setAction("com.example.intent.broadcast");
        CarInfoManager carInfo = (CarInfoManager) car.getCarManager(Car.INFO_SERVICE);
        intent.putExtra("Battery Capacity", carInfo.getEvBatteryCapacity());
        intent.putExtra("Connector Types", carInfo.getEvConnectorTypes());
        intent.putExtra("Fuel Capacity", carInfo.getFuelCapacity());
        intent.putExtra("Fuel Types", carInfo.getFuelTypes());
        intent.putExtra("Manufacturer", carInfo.getManufacturer());
        intent.putExtra("Model", carInfo.getModel());
        // SINK
        sendBroadcast(intent);
        // Solution 1
        LocalBroadcastManager.getInstance(this).sendBroadcast(v1);
        // Solution 2
        sendBroadcast(intent, "com.intent.broadcast.permission");
    }
}
